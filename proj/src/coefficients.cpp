#include "nemytskii/coefficients.hpp"

#include "nemytskii/error.hpp"
#include "numerics.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nemytskii {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

// NonlinearitySpec -------------------------------------------------------------

struct NonlinearitySpec::Table {
    boost::math::interpolators::cardinal_cubic_b_spline<double> spline;
    double r_max;
    double end_value;
    double end_slope;
    double step = 0.0;
    /// The spline on [0, step] as c1 r + c2 r² + c3 r³, which keeps
    /// relative accuracy as r -> 0.
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;

    double value(double a) const {
        if (a < step) {
            return a * (c1 + a * (c2 + a * c3));
        }
        return a <= r_max ? spline(a) : end_value + end_slope * (a - r_max);
    }
    double slope(double a) const {
        if (a < step) {
            return c1 + a * (2 * c2 + 3 * a * c3);
        }
        return a <= r_max ? spline.prime(a) : end_slope;
    }
};

NonlinearitySpec::NonlinearitySpec(Kind kind, double m, double zeta,
                                   std::shared_ptr<const Table> table)
    : kind_(kind), m_(m), zeta_(zeta), table_(std::move(table)) {
    if (!(m_ > 1.0) || !std::isfinite(m_)) {
        throw ConfigError("m must exceed 1 (got " + fmt_double(m_) + ")");
    }
    if (!(zeta_ >= 0.0 && zeta_ <= 1.0)) {
        throw ConfigError("zeta must lie in [0, 1] (got " + fmt_double(zeta_) + ")");
    }
}

NonlinearitySpec NonlinearitySpec::power_law(double m, double zeta) {
    return NonlinearitySpec(Kind::power_law, m, zeta, nullptr);
}

NonlinearitySpec NonlinearitySpec::custom(std::vector<double> samples, double r_max, double m,
                                          double zeta) {
    if (samples.size() < 4) {
        throw ConfigError("custom beta table needs at least 4 samples");
    }
    if (!(r_max > 0.0)) {
        throw ConfigError("custom beta table needs r_max > 0");
    }
    if (samples.front() != 0.0) {
        throw ConfigError("custom beta table must satisfy beta(0) = 0");
    }
    for (std::size_t j = 1; j < samples.size(); ++j) {
        if (!(samples[j] > samples[j - 1])) {
            throw ConfigError("custom beta table is not strictly increasing at sample " +
                              std::to_string(j));
        }
    }
    const double step = r_max / static_cast<double>(samples.size() - 1);
    // Boost's default end-slope estimate is first order; supply one-sided
    // differences of fourth order (second order on tiny tables).
    const auto& f = samples;
    const std::size_t n = f.size();
    double left, right;
    if (n >= 5) {
        left = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * step);
        right = (25 * f[n - 1] - 48 * f[n - 2] + 36 * f[n - 3] - 16 * f[n - 4] + 3 * f[n - 5]) / (12 * step);
    } else {
        left = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * step);
        right = (3 * f[n - 1] - 4 * f[n - 2] + f[n - 3]) / (2 * step);
    }
    auto table = std::make_shared<Table>(Table{
        boost::math::interpolators::cardinal_cubic_b_spline<double>(samples.begin(), samples.end(),
                                                                    0.0, step, left, right),
        r_max, 0.0, 0.0});
    table->end_value = table->spline(r_max);
    table->end_slope = table->spline.prime(r_max);
    table->step = step;
    table->c1 = table->spline.prime(0.0);
    table->c2 = 0.5 * table->spline.double_prime(0.0);
    table->c3 = (table->spline(step) - step * (table->c1 + step * table->c2)) / (step * step * step);

    // The spline can wiggle between monotone samples; reject it if so.
    const std::size_t probes = 16 * (samples.size() - 1);
    double prev = 0.0;
    for (std::size_t j = 1; j <= probes; ++j) {
        const double r = r_max * static_cast<double>(j) / static_cast<double>(probes);
        const double v = table->spline(r);
        if (!(v > prev)) {
            throw ConfigError("custom beta interpolant is not strictly increasing near r = " +
                              fmt_double(r));
        }
        prev = v;
    }
    if (!(table->end_slope > 0.0)) {
        throw ConfigError("custom beta table must have positive slope at r_max");
    }
    return NonlinearitySpec(Kind::custom, m, zeta, std::move(table));
}

double NonlinearitySpec::beta(double r) const {
    if (kind_ == Kind::power_law) {
        return std::pow(std::abs(r), m_ - 1.0) * r;
    }
    const double a = std::abs(r);
    const double v = table_->value(a);
    return r < 0.0 ? -v : v;
}

double NonlinearitySpec::beta_prime(double r) const {
    if (kind_ == Kind::power_law) {
        return m_ * std::pow(std::abs(r), m_ - 1.0);
    }
    const double a = std::abs(r);
    return table_->slope(a);
}

double NonlinearitySpec::beta_inverse(double y) const {
    if (kind_ == Kind::power_law) {
        return std::copysign(std::pow(std::abs(y), 1.0 / m_), y);
    }
    const double a = std::abs(y);
    if (a == 0.0) {
        return 0.0;
    }
    double hi = 1.0;
    while (beta(hi) < a) {
        hi *= 2.0;
    }
    while (hi > std::numeric_limits<double>::min() && beta(0.5 * hi) >= a) {
        hi *= 0.5;
    }
    // Solve for z = x / hi in [1/2, 1] so the tolerance is relative.
    const double z = detail::solve_increasing(
        [&](double zz, double& f, double& df) {
            f = (beta(zz * hi) - a) / a;
            df = beta_prime(zz * hi) * hi / a;
        },
        0.5, 1.0, 0.75, 1e-14);
    const double r = z * hi;
    return y < 0.0 ? -r : r;
}

// Drift pieces -------------------------------------------------------------------

VectorField VectorField::zero() {
    VectorField e;
    e.name = "zero";
    e.value = [](double) { return 0.0; };
    e.divergence = [](double) { return 0.0; };
    e.square_integrable = true;
    e.is_zero = true;
    return e;
}

VectorField VectorField::tanh_profile(double strength) {
    VectorField e;
    e.name = "tanh";
    e.value = [strength](double x) { return strength * std::tanh(x); };
    e.divergence = [strength](double x) {
        const double c = 1.0 / std::cosh(x);
        return strength * c * c;
    };
    const double a = std::abs(strength);
    e.sup_abs = a;
    if (strength < 0.0) {
        // (div E)⁻ + |E| = a (1 - y² + y), y = |tanh x|, maximal at y = 1/2.
        e.sup_div_minus = a;
        e.sup_div_minus_plus_abs = 1.25 * a;
    } else {
        e.sup_div_minus = 0.0;
        e.sup_div_minus_plus_abs = a;
    }
    e.iota = 0.5 * std::max(strength, 0.0);
    e.square_integrable = strength == 0.0;
    e.is_zero = strength == 0.0;
    return e;
}

VectorField VectorField::gaussian_dipole(double amplitude, double width) {
    if (!(width > 0.0)) {
        throw ConfigError("gaussian dipole width must be positive");
    }
    VectorField e;
    e.name = "gaussian_dipole";
    const double w2 = width * width;
    e.value = [amplitude, w2](double x) { return amplitude * x * std::exp(-x * x / (2.0 * w2)); };
    e.divergence = [amplitude, w2](double x) {
        return amplitude * (1.0 - x * x / w2) * std::exp(-x * x / (2.0 * w2));
    };
    const double a = std::abs(amplitude);
    e.sup_abs = a * width * std::exp(-0.5);
    // div E = a (1 - y) e^{-y/2}, y = x²/w²: most negative at y = 3 (a > 0) or y = 0 (a < 0).
    e.sup_div_minus = amplitude > 0.0 ? 2.0 * a * std::exp(-1.5) : a;
    double best = 0.0;
    for (int j = 0; j <= 20000; ++j) {
        const double x = 8.0 * width * static_cast<double>(j) / 20000.0;
        best = std::max(best, std::max(-e.divergence(x), 0.0) + std::abs(e.value(x)));
    }
    e.sup_div_minus_plus_abs = best;
    e.iota = 0.5 * std::max(amplitude, 0.0);
    if (amplitude < 0.0) {
        e.iota = a * std::exp(-1.5);
    }
    e.square_integrable = true;
    e.is_zero = amplitude == 0.0;
    return e;
}

ScalarResponse ScalarResponse::zero() {
    ScalarResponse b;
    b.name = "zero";
    b.value = [](double) { return 0.0; };
    b.derivative = [](double) { return 0.0; };
    b.is_constant = true;
    return b;
}

ScalarResponse ScalarResponse::constant(double c) {
    if (!(c >= 0.0)) {
        throw ConfigError("constant response b must be nonnegative");
    }
    ScalarResponse b;
    b.name = "constant";
    b.value = [c](double) { return c; };
    b.derivative = [](double) { return 0.0; };
    b.sup_abs = c;
    b.is_constant = true;
    return b;
}

ScalarResponse ScalarResponse::monomial(double l, double r_sat) {
    if (!(l >= 1.0)) {
        throw ConfigError("monomial response needs l >= 1");
    }
    if (!(r_sat > 0.0)) {
        throw ConfigError("monomial response needs r_sat > 0");
    }
    ScalarResponse b;
    b.name = "monomial";
    const double top = std::pow(r_sat, l);
    const double slope = l * std::pow(r_sat, l - 1.0);
    const double scale = r_sat;  // saturation adds at most slope * scale
    b.value = [=](double r) {
        if (r <= 0.0) {
            return 0.0;
        }
        if (r <= r_sat) {
            return std::pow(r, l);
        }
        return top + slope * scale * std::tanh((r - r_sat) / scale);
    };
    b.derivative = [=](double r) {
        if (r <= 0.0) {
            return 0.0;
        }
        if (r <= r_sat) {
            return l * std::pow(r, l - 1.0);
        }
        const double c = 1.0 / std::cosh((r - r_sat) / scale);
        return slope * c * c;
    };
    b.sup_abs = top + slope * scale;
    b.monomial_exponent = l;
    return b;
}

ScalarResponse ScalarResponse::clipped_identity() {
    ScalarResponse b;
    b.name = "clipped_identity";
    b.value = [](double r) { return std::clamp(r, 0.0, 1.0); };
    b.derivative = [](double r) { return (r > 0.0 && r < 1.0) ? 1.0 : 0.0; };
    b.sup_abs = 1.0;
    return b;
}

bool DriftSpec::is_driftless() const noexcept {
    return E.is_zero || (b.is_constant && b.sup_abs == 0.0);
}

RegularizationParams RegularizationParams::from_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw ConfigError("regularization epsilon must lie in (0, 1)");
    }
    return RegularizationParams{epsilon, epsilon, 1.0 / epsilon};
}

// Diffusivity -----------------------------------------------------------------------

double beta_eval(const NonlinearitySpec& spec, double r) {
    return spec.beta(r);
}

double sigma_squared(const NonlinearitySpec& spec, double r) {
    if (r < 0.0 || std::isnan(r)) {
        throw DomainError("sigma_squared needs a nonnegative density value");
    }
    if (r == 0.0) {
        return 2.0 * spec.beta_prime(0.0);
    }
    return 2.0 * spec.beta(r) / r;
}

double yosida_resolvent(const NonlinearitySpec& spec, double epsilon, double r) {
    if (!(epsilon > 0.0)) {
        throw DomainError("yosida_resolvent needs epsilon > 0");
    }
    if (r == 0.0) {
        return 0.0;
    }
    const double lo = std::min(0.0, r);
    const double hi = std::max(0.0, r);
    // g + εβ(g) - r is convex on the side of r for power laws, so starting at
    // g = r gives monotone Newton convergence.
    return detail::solve_increasing(
        [&](double g, double& f, double& df) {
            f = g + epsilon * spec.beta(g) - r;
            df = 1.0 + epsilon * spec.beta_prime(g);
        },
        lo, hi, r, 1e-12);
}

double beta_epsilon(const NonlinearitySpec& spec, double epsilon, double r) {
    return spec.beta(yosida_resolvent(spec, epsilon, r));
}

double beta_tilde_epsilon(const NonlinearitySpec& spec, double epsilon, double r) {
    return beta_epsilon(spec, epsilon, r) + epsilon * r;
}

double beta_tilde_epsilon_prime(const NonlinearitySpec& spec, double epsilon, double r) {
    const double bp = spec.beta_prime(yosida_resolvent(spec, epsilon, r));
    return bp / (1.0 + epsilon * bp) + epsilon;
}

// Drift regularizations -------------------------------------------------------------

double mollifier(double s, double width) {
    const double z = s / width;
    if (std::abs(z) >= 1.0) {
        return 0.0;
    }
    const double q = 1.0 - z * z;
    return q * q * 15.0 / (16.0 * width);
}

namespace {

template <class F>
double convolve_with_bump(F&& f, double r, double width) {
    using boost::math::quadrature::gauss;
    return gauss<double, 30>::integrate(
        [&](double s) { return f(r - s) * mollifier(s, width); }, -width, width);
}

}  // namespace

double mollified_b(const DriftSpec& drift, double epsilon, double r) {
    if (drift.b.is_constant) {
        return drift.b.value(r);
    }
    const double conv = convolve_with_bump(drift.b.value, r, epsilon);
    return std::max(conv, 0.0) / (1.0 + epsilon * std::abs(r));
}

double mollified_b_prime(const DriftSpec& drift, double epsilon, double r) {
    if (drift.b.is_constant) {
        return 0.0;
    }
    const double damp = 1.0 + epsilon * std::abs(r);
    const double conv = convolve_with_bump(drift.b.value, r, epsilon);
    const double dconv = convolve_with_bump(drift.b.derivative, r, epsilon);
    const double sgn = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
    return dconv / damp - epsilon * sgn * conv / (damp * damp);
}

double cutoff_E(const DriftSpec& drift, double epsilon, double x) {
    if (drift.E.is_zero) {
        return 0.0;
    }
    if (drift.E.square_integrable) {
        return drift.E.value(x);
    }
    const double radius = 1.0 / epsilon;
    const double a = std::abs(x);
    if (a <= radius) {
        return drift.E.value(x);
    }
    const double eta = std::max(0.0, 1.0 - (a - radius));
    return eta == 0.0 ? 0.0 : eta * drift.E.value(x);
}

// Functionals of β ------------------------------------------------------------------

namespace {

void require_g_integrable(const NonlinearitySpec& spec) {
    if (!(2.0 * spec.zeta() / spec.m() < 1.0)) {
        throw ConfigError("G diverges: need 2*zeta/m < 1");
    }
}

}  // namespace

double capital_G(const NonlinearitySpec& spec, double r) {
    require_g_integrable(spec);
    if (r < 0.0) {
        throw DomainError("capital_G needs r >= 0");
    }
    if (r == 0.0) {
        return 0.0;
    }
    const double zeta = spec.zeta();
    if (zeta == 0.0) {
        return r;
    }
    if (spec.is_power_law()) {
        // β⁻¹(s²) = s^{2/m}
        const double e = 1.0 - 2.0 * zeta / spec.m();
        return std::pow(r, e) / e;
    }
    boost::math::quadrature::tanh_sinh<double> integrator;
    // Where s² underflows the integrable singularity contributes nothing.
    return integrator.integrate(
        [&](double s) {
            const double rho = spec.beta_inverse(s * s);
            return rho > 0.0 ? std::pow(rho, -zeta) : 0.0;
        },
        0.0, r);
}

double capital_G_inverse(const NonlinearitySpec& spec, double y) {
    require_g_integrable(spec);
    if (y < 0.0) {
        throw DomainError("capital_G_inverse needs y >= 0");
    }
    if (y == 0.0) {
        return 0.0;
    }
    double hi = 1.0;
    while (capital_G(spec, hi) < y) {
        hi *= 2.0;
    }
    const double zeta = spec.zeta();
    return detail::solve_increasing(
        [&](double x, double& f, double& df) {
            f = capital_G(spec, x) - y;
            df = x > 0.0 ? std::pow(spec.beta_inverse(x * x), -zeta) : kInf;
        },
        0.0, hi, 0.5 * hi, 1e-14);
}

double entropy_Psi(const NonlinearitySpec& spec, double r) {
    if (r < 0.0) {
        throw DomainError("entropy_Psi needs r >= 0");
    }
    if (r == 0.0) {
        return 0.0;
    }
    if (spec.is_power_law()) {
        return spec.m() * r * (std::log(r) - 1.0);
    }
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(
        [&](double s) {
            const double b = spec.beta(s);
            return b > 0.0 ? std::log(b) : 0.0;
        },
        0.0, r);
}

double lambda_zero(const DriftSpec& drift) {
    const double k = drift.E.is_zero ? 0.0 : drift.drift_bound();
    const double denom = k + std::sqrt(k) * drift.sup_norm_b();
    return denom > 0.0 ? 1.0 / denom : kInf;
}

// Hypotheses ------------------------------------------------------------------------

bool HypothesesReport::all_passed() const {
    return std::all_of(clauses.begin(), clauses.end(),
                       [](const ClauseResult& c) { return c.passed || c.advisory; });
}

const ClauseResult* HypothesesReport::find(const std::string& id) const {
    const auto it = std::find_if(clauses.begin(), clauses.end(),
                                 [&](const ClauseResult& c) { return c.id == id; });
    return it == clauses.end() ? nullptr : &*it;
}

namespace {

// Geometric samples on (0, K] dense near the degenerate origin.
std::vector<double> log_grid(double k, std::size_t n = 400) {
    std::vector<double> r(n);
    for (std::size_t j = 0; j < n; ++j) {
        r[j] = k * std::pow(10.0, -8.0 * static_cast<double>(n - 1 - j) / static_cast<double>(n - 1));
    }
    return r;
}

ClauseResult check_beta_monotone(const NonlinearitySpec& spec) {
    ClauseResult c{"H1.beta_monotone", true, false, ""};
    if (spec.beta(0.0) != 0.0) {
        c.passed = false;
        c.witness = "beta(0) = " + fmt_double(spec.beta(0.0));
        return c;
    }
    double prev = spec.beta(-10.0);
    for (int j = -999; j <= 1000; ++j) {
        const double r = 10.0 * j / 1000.0;
        const double v = spec.beta(r);
        if (!(v > prev)) {
            c.passed = false;
            c.witness = "not strictly increasing at r = " + fmt_double(r);
            return c;
        }
        prev = v;
    }
    c.witness = "strictly increasing on [-10, 10], beta(0) = 0";
    return c;
}

ClauseResult check_h1_bounds(const NonlinearitySpec& spec) {
    ClauseResult c{"H1.power_bounds", true, false, ""};
    const double m = spec.m();
    std::ostringstream w;
    for (double k : {1.0, 10.0}) {
        double a_k = kInf;
        double c_k = 0.0;
        for (double r : log_grid(k)) {
            a_k = std::min(a_k, spec.beta_prime(r) / std::pow(r, m - 1.0));
            c_k = std::max(c_k, spec.beta(r) / std::pow(r, m));
        }
        const bool ok = a_k > 0.0 && std::isfinite(a_k) && std::isfinite(c_k) && c_k < 1e12;
        c.passed = c.passed && ok;
        w << (k > 1.0 ? "; " : "") << "K=" << k << ": a_K=" << fmt_double(a_k) << ", C_K=" << fmt_double(c_k);
    }
    c.witness = w.str();
    return c;
}

ClauseResult check_zeta(const NonlinearitySpec& spec) {
    ClauseResult c{"H1.zeta_range", true, false, ""};
    const double q = 2.0 * spec.zeta() / spec.m();
    c.passed = spec.zeta() >= 0.0 && spec.zeta() <= 1.0 && q < 1.0;
    c.witness = "2*zeta/m = " + fmt_double(q);
    return c;
}

ClauseResult check_E_bounds(const DriftSpec& drift) {
    ClauseResult c{"H2a.E_bounded", true, false, ""};
    if (drift.E.is_zero) {
        c.witness = "E = 0 (vacuous)";
        return c;
    }
    double sup_e = 0.0;
    double sup_div_minus = 0.0;
    for (int j = -4000; j <= 4000; ++j) {
        const double x = 20.0 * j / 4000.0;
        sup_e = std::max(sup_e, std::abs(drift.E.value(x)));
        sup_div_minus = std::max(sup_div_minus, -drift.E.divergence(x));
    }
    c.passed = std::isfinite(sup_e) && sup_e <= drift.E.sup_abs * (1.0 + 1e-9) + 1e-12 &&
               sup_div_minus <= drift.E.sup_div_minus * (1.0 + 1e-9) + 1e-12;
    c.witness = "sampled sup|E| = " + fmt_double(sup_e) + ", sup (div E)^- = " +
                fmt_double(std::max(sup_div_minus, 0.0));
    return c;
}

ClauseResult check_E_monotonicity(const DriftSpec& drift) {
    ClauseResult c{"H2a.monotonicity", true, true, ""};
    if (drift.E.is_zero) {
        c.witness = "E = 0 (vacuous)";
        return c;
    }
    double worst = -kInf;
    for (double radius : {1.0, 5.0, 10.0}) {
        const int n = 200;
        for (int i = 0; i <= n; ++i) {
            const double x = -radius + 2.0 * radius * i / n;
            for (int j = 0; j < i; ++j) {
                const double y = -radius + 2.0 * radius * j / n;
                const double lhs = (drift.E.value(x) - drift.E.value(y)) * (x - y);
                const double rhs = 2.0 * drift.E.iota * (x - y) * (x - y);
                worst = std::max(worst, lhs - rhs);
            }
        }
    }
    c.passed = worst <= 1e-10;
    c.witness = "iota = " + fmt_double(drift.E.iota) + ", max violation = " + fmt_double(worst);
    return c;
}

ClauseResult check_b_bounds(const DriftSpec& drift) {
    ClauseResult c{"H2b.i.b_bounded_nonnegative", true, false, ""};
    double lo = kInf;
    double sup = 0.0;
    for (int j = -1000; j <= 10000; ++j) {
        const double r = 100.0 * j / 10000.0;
        const double v = drift.b.value(r);
        lo = std::min(lo, v);
        sup = std::max(sup, std::abs(v));
    }
    c.passed = lo >= 0.0 && sup <= drift.b.sup_abs * (1.0 + 1e-9) + 1e-12;
    c.witness = "min b = " + fmt_double(lo) + ", sampled sup|b| = " + fmt_double(sup) +
                ", declared = " + fmt_double(drift.b.sup_abs);
    return c;
}

ClauseResult check_monomial(const NonlinearitySpec& spec, double l) {
    ClauseResult c{"H2b.ii.monomial", true, false, ""};
    const double need = spec.m() / 2.0 - spec.zeta();
    c.passed = l >= need;
    c.witness = "l = " + fmt_double(l) + ", m/2 - zeta = " + fmt_double(need);
    return c;
}

// y ↦ (G∘β^{1/2})⁻¹(y)
double inverse_G_sqrt_beta(const NonlinearitySpec& spec, double y) {
    if (y <= 0.0) {
        return 0.0;
    }
    const double m = spec.m();
    const double zeta = spec.zeta();
    if (spec.is_power_law()) {
        const double e = 1.0 - 2.0 * zeta / m;
        return std::pow(e * y, 1.0 / (m / 2.0 - zeta));
    }
    const double q = capital_G_inverse(spec, y);  // q = β^{1/2}(r)
    return spec.beta_inverse(q * q);
}

ClauseResult check_composite_lipschitz(const NonlinearitySpec& spec, const DriftSpec& drift) {
    ClauseResult c{"H2b.ii.lipschitz_sampled", true, true, ""};
    if (drift.b.is_constant) {
        c.witness = "b constant (vacuous)";
        return c;
    }
    // Difference quotients against 0 at y = 10^-k; a locally Lipschitz
    // composite keeps them bounded as k grows.
    auto phi = [&](double y) { return drift.b.value(inverse_G_sqrt_beta(spec, y)); };
    const double base = phi(0.0);
    double q_mid = 0.0;
    double q_small = 0.0;
    for (int k = 2; k <= 10; ++k) {
        const double y = std::pow(10.0, -k);
        const double q = std::abs(phi(y) - base) / y;
        if (k == 5) {
            q_mid = q;
        }
        q_small = q;
    }
    double sup_uniform = 0.0;
    const int n = 2000;
    for (int j = 0; j < n; ++j) {
        const double y0 = 2.0 * j / n;
        const double y1 = 2.0 * (j + 1) / n;
        sup_uniform = std::max(sup_uniform, std::abs(phi(y1) - phi(y0)) / (y1 - y0));
    }
    c.passed = std::isfinite(q_small) && q_small <= 10.0 * std::max(q_mid, 1e-300) + 1e-12;
    c.witness = "slope near 0 at y=1e-5: " + fmt_double(q_mid) + ", at y=1e-10: " +
                fmt_double(q_small) + ", max slope on [0,2]: " + fmt_double(sup_uniform);
    return c;
}

ClauseResult check_iii_or_iv(const NonlinearitySpec& spec, const DriftSpec& drift) {
    ClauseResult c{"H2b.iii_or_iv", true, false, ""};
    double worst = 0.0;
    for (double r : log_grid(10.0)) {
        worst = std::max(worst, spec.beta_prime(r) * r / spec.beta(r));
    }
    const bool iii = std::isfinite(worst) && worst < 1e12;
    const bool iv = drift.E.square_integrable && drift.E.sup_div_minus == 0.0;
    c.passed = iii || iv;
    c.witness = "sup beta'(r) r / beta(r) on (0,10] = " + fmt_double(worst) +
                (iv ? "; E in L2 with div E >= 0" : "");
    return c;
}

}  // namespace

HypothesesReport check_hypotheses(const NonlinearitySpec& spec, const DriftSpec& drift) {
    HypothesesReport report;
    report.clauses.push_back(check_beta_monotone(spec));
    report.clauses.push_back(check_h1_bounds(spec));
    report.clauses.push_back(check_zeta(spec));
    report.clauses.push_back(check_E_bounds(drift));
    report.clauses.push_back(check_E_monotonicity(drift));
    report.clauses.push_back(check_b_bounds(drift));
    if (drift.b.monomial_exponent && spec.is_power_law()) {
        report.clauses.push_back(check_monomial(spec, *drift.b.monomial_exponent));
    }
    if (2.0 * spec.zeta() / spec.m() < 1.0) {
        report.clauses.push_back(check_composite_lipschitz(spec, drift));
    }
    report.clauses.push_back(check_iii_or_iv(spec, drift));
    return report;
}

}  // namespace nemytskii
