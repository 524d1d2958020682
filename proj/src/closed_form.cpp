#include "nemytskii/closed_form.hpp"

#include "nemytskii/error.hpp"
#include "numerics.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <string>

namespace nemytskii {

namespace {

constexpr double kHalfPi = boost::math::constants::half_pi<double>();

double sphere_area(int d) {
    // |S^{d-1}| = 2 π^{d/2} / Γ(d/2)
    return 2.0 * std::pow(boost::math::constants::pi<double>(), 0.5 * d) / std::tgamma(0.5 * d);
}

void validate(int d, double m) {
    if (!(m > 1.0) || !std::isfinite(m)) {
        throw ConfigError("Barenblatt profile needs m > 1");
    }
    if (d != 1 && d < 3) {
        throw ConfigError("Barenblatt profile supports d = 1 or radial d >= 3 (got d = " +
                          std::to_string(d) + ")");
    }
}

// Profile at t = 1 as a function of the radius, for a trial constant c.
double profile(double c, double k, double m, double r) {
    const double base = c - k * r * r;
    return base > 0.0 ? std::pow(base, 1.0 / (m - 1.0)) : 0.0;
}

// ∫ F(r) w(r) over the ball of radius R where F vanishes like a power at R.
// r = R sin θ turns the boundary kink into a smooth cos^{…} factor.
template <class F>
double integrate_ball_composite(int d, double radius, F&& f) {
    using boost::math::quadrature::gauss;
    constexpr int panels = 32;
    double total = 0.0;
    if (d == 1) {
        const double h = 2.0 * kHalfPi / panels;
        for (int j = 0; j < panels; ++j) {
            const double a = -kHalfPi + j * h;
            total += gauss<double, 20>::integrate(
                [&](double th) { return f(radius * std::sin(th)) * radius * std::cos(th); }, a, a + h);
        }
        return total;
    }
    const double h = kHalfPi / panels;
    for (int j = 0; j < panels; ++j) {
        const double a = j * h;
        total += gauss<double, 20>::integrate(
            [&](double th) {
                const double r = radius * std::sin(th);
                return f(r) * std::pow(r, d - 1) * radius * std::cos(th);
            },
            a, a + h);
    }
    return sphere_area(d) * total;
}

template <class F>
double integrate_ball_adaptive(int d, double radius, F&& f) {
    using boost::math::quadrature::gauss_kronrod;
    if (d == 1) {
        return gauss_kronrod<double, 31>::integrate(
            [&](double th) { return f(radius * std::sin(th)) * radius * std::cos(th); }, -kHalfPi,
            kHalfPi, 20, 1e-15);
    }
    return sphere_area(d) *
           gauss_kronrod<double, 31>::integrate(
               [&](double th) {
                   const double r = radius * std::sin(th);
                   return f(r) * std::pow(r, d - 1) * radius * std::cos(th);
               },
               0.0, kHalfPi, 20, 1e-15);
}

}  // namespace

double BarenblattParams::support_radius(double t) const {
    return std::sqrt(c_norm / k) * std::pow(t, beta_ss);
}

BarenblattParams make_barenblatt(int d, double m, double x0) {
    validate(d, m);
    BarenblattParams p;
    p.d = d;
    p.m = m;
    p.x0 = x0;
    p.alpha = static_cast<double>(d) / (d * (m - 1.0) + 2.0);
    p.k = p.alpha * (m - 1.0) / (2.0 * m * d);
    p.beta_ss = p.alpha / d;

    auto mass_of = [&](double c) {
        return integrate_ball_composite(d, std::sqrt(c / p.k),
                                        [&](double r) { return profile(c, p.k, m, r); });
    };
    double hi = 1.0;
    while (mass_of(hi) < 1.0) {
        hi *= 2.0;
    }
    double lo = hi / 2.0;
    while (mass_of(lo) > 1.0) {
        lo /= 2.0;
    }
    p.c_norm = detail::bisect_increasing(mass_of, lo, hi, 1.0);
    return p;
}

double barenblatt_eval(const BarenblattParams& p, double t, double x) {
    if (!(t > 0.0)) {
        throw DomainError("Barenblatt profile is only a function for t > 0");
    }
    const double y = (x - p.x0) * std::pow(t, -p.beta_ss);
    const double base = p.c_norm - p.k * y * y;
    if (base <= 0.0) {
        return 0.0;
    }
    return std::pow(t, -p.alpha) * std::pow(base, 1.0 / (p.m - 1.0));
}

double barenblatt_mass(const BarenblattParams& p, double t) {
    const double radius = p.support_radius(t);
    return integrate_ball_adaptive(p.d, radius,
                                   [&](double r) { return barenblatt_eval(p, t, p.x0 + r); });
}

double barenblatt_moment2(const BarenblattParams& p, double t) {
    if (!(t > 0.0)) {
        throw DomainError("barenblatt_moment2 needs t > 0");
    }
    const double radius = p.support_radius(t);
    return integrate_ball_adaptive(
        p.d, radius, [&](double r) { return r * r * barenblatt_eval(p, t, p.x0 + r); });
}

RegularityThreshold regularity_threshold(double m, double p) {
    if (!(m > 1.0)) {
        throw DomainError("regularity_threshold needs m > 1");
    }
    if (!(p > 0.0 && p <= m)) {
        throw DomainError("regularity_threshold needs p in (0, m]");
    }
    return RegularityThreshold{2.0 * p / m, m * (2.0 * p - m + 1.0) > p};
}

TimeIntegrability time_integrability_exponent(const BarenblattParams& p, double pw, double s) {
    if (!(pw > 0.0 && pw <= p.m)) {
        throw DomainError("time_integrability_exponent needs pw in (0, m]");
    }
    if (!(s >= 0.0)) {
        throw DomainError("time_integrability_exponent needs s >= 0");
    }
    const double e = -p.alpha * (p.m - 1.0) - p.beta_ss * s * p.m / pw;
    // e + 1 = (2 - s m / pw) / (d(m-1) + 2); decide the sign from the
    // numerator so the boundary s = 2pw/m is classified exactly.
    return TimeIntegrability{e, s * p.m < 2.0 * pw};
}

}  // namespace nemytskii
