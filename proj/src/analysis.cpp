#include "nemytskii/analysis.hpp"

#include "nemytskii/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nemytskii {

// SampledFunction ------------------------------------------------------------------

SampledFunction::SampledFunction(double x_first, double spacing, std::vector<double> values,
                                 std::optional<std::vector<double>> derivative_values)
    : x_first_(x_first),
      spacing_(spacing),
      values_(std::move(values)),
      derivative_(std::move(derivative_values)) {
    if (!(spacing_ > 0.0)) {
        throw InputError("sampled function needs positive spacing");
    }
    if (values_.size() < 2) {
        throw InputError("sampled function needs at least two samples");
    }
    if (derivative_ && derivative_->size() != values_.size()) {
        throw InputError("derivative samples must match the value samples");
    }
    const auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(values_.begin(), values_.end(), finite) ||
        (derivative_ && !std::all_of(derivative_->begin(), derivative_->end(), finite))) {
        throw InputError("sampled function values must be finite");
    }
}

SampledFunction SampledFunction::sample(double lo, double hi, std::size_t n,
                                        const std::function<double(double)>& f) {
    if (n < 2 || !(hi > lo)) {
        throw InputError("sample needs n >= 2 and lo < hi");
    }
    const double dx = (hi - lo) / static_cast<double>(n);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = f(lo + (static_cast<double>(i) + 0.5) * dx);
    }
    return SampledFunction(lo + 0.5 * dx, dx, std::move(v));
}

std::span<const double> SampledFunction::derivative_values() const {
    if (!derivative_) {
        throw InputError("sampled function has no derivative samples");
    }
    return *derivative_;
}

std::size_t SampledFunction::nearest(double x) const noexcept {
    const double idx = std::round((x - x_first_) / spacing_);
    if (idx <= 0.0) {
        return 0;
    }
    return std::min(static_cast<std::size_t>(idx), values_.size() - 1);
}

WeightFunction WeightFunction::power(double gamma, double alpha_w) {
    if (!(gamma > 0.0 && gamma <= 0.5)) {
        throw ConfigError("weight exponent gamma must lie in (0, 1/2]");
    }
    if (!(alpha_w >= 2.0)) {
        throw ConfigError("weight integrability exponent must be >= 2");
    }
    if (!(2.0 * gamma * alpha_w > 1.0)) {
        throw ConfigError("Phi^{-alpha} is not integrable: need 2*gamma*alpha > 1");
    }
    return WeightFunction{[gamma](double x) { return std::pow(1.0 + x * x, gamma); }, alpha_w};
}

WeightFunction WeightFunction::unit() {
    // Φ ≡ 1 is the L¹ limit of the class; Φ^{-α} is not integrable.
    return WeightFunction{[](double) { return 1.0; }, 2.0};
}

// Maximal function -------------------------------------------------------------

MaximalFunction::MaximalFunction(std::span<const double> cell_values, double lo_edge,
                                 double spacing)
    : lo_(lo_edge), dx_(spacing), prefix_(cell_values.size() + 1, 0.0) {
    for (std::size_t i = 0; i < cell_values.size(); ++i) {
        prefix_[i + 1] = prefix_[i] + std::abs(cell_values[i]) * dx_;
    }
}

MaximalFunction::MaximalFunction(const SampledFunction& f)
    : MaximalFunction(f.values(), f.lo_edge(), f.spacing()) {}

double MaximalFunction::integral(double a, double b) const {
    const std::size_t n = prefix_.size() - 1;
    auto cumulative = [&](double x) {
        const double pos = (x - lo_) / dx_;
        if (pos <= 0.0) {
            return 0.0;
        }
        if (pos >= static_cast<double>(n)) {
            return prefix_[n];
        }
        const auto j = static_cast<std::size_t>(pos);
        return prefix_[j] + (pos - static_cast<double>(j)) * (prefix_[j + 1] - prefix_[j]);
    };
    return cumulative(b) - cumulative(a);
}

double MaximalFunction::operator()(double x, double R) const {
    const double hi = lo_ + dx_ * static_cast<double>(prefix_.size() - 1);
    // Past the ball that swallows the whole window the average only decays.
    const double r_cover = std::max(x - lo_, hi - x) + dx_;
    const double r_limit = std::min(R, r_cover);
    const double half = 0.5 * dx_;
    double best = 0.0;
    for (std::size_t j = 1;; ++j) {
        const double r = half * static_cast<double>(j);
        if (r > r_limit) {
            break;
        }
        best = std::max(best, integral(x - r, x + r) / (2.0 * r));
    }
    return best;
}

double maximal_function(const SampledFunction& f, double R, double x) {
    return MaximalFunction(f)(x, R);
}

LipschitzReport lipschitz_estimate_check(const SampledFunction& f,
                                         std::span<const std::pair<double, double>> pairs,
                                         double R, double c_d) {
    const auto deriv = f.derivative_values();
    const MaximalFunction max_df(deriv, f.lo_edge(), f.spacing());
    LipschitzReport report;
    report.c_d = c_d;
    for (const auto& [px, py] : pairs) {
        if (std::abs(px - py) > R) {
            throw InputError("lipschitz_estimate_check needs |x - y| <= R for every pair");
        }
        const std::size_t i = f.nearest(px);
        const std::size_t j = f.nearest(py);
        ++report.pairs_checked;
        if (i == j) {
            continue;
        }
        const double x = f.x(i);
        const double y = f.x(j);
        const double lhs = std::abs(f.values()[i] - f.values()[j]);
        const double denom = (max_df(x, R) + max_df(y, R)) * std::abs(x - y);
        double ratio = 0.0;
        if (denom > 0.0) {
            ratio = lhs / denom;
        } else if (lhs > 0.0) {
            ratio = std::numeric_limits<double>::infinity();
        }
        report.max_ratio = std::max(report.max_ratio, ratio);
        if (ratio > c_d) {
            ++report.violations;
        }
    }
    return report;
}

// Gagliardo seminorm -------------------------------------------------------------

namespace {

double gagliardo_pth_power(std::span<const double> v, std::span<const double> slope, double lo_edge,
                           double hi_edge, double x_first, double dx, double s, double p) {
    const std::size_t n = v.size();
    const double sp = s * p;
    const bool square = p == 2.0;
    auto pw = [&](double a) { return square ? a * a : std::pow(a, p); };

    // |x_i - x_j| = k dx depends on k only.
    std::vector<double> partial(n, 0.0);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t k = 1; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i + k < n; ++i) {
            acc += pw(std::abs(v[i] - v[i + k]));
        }
        partial[k] = acc * std::pow(static_cast<double>(k) * dx, -(1.0 + sp));
    }
    double total = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        total += partial[k];
    }
    total *= 2.0 * dx * dx;

    // Diagonal cell: |f'(x_i)|^p ∫∫_{cell²} |x-y|^{q-1}, q = p(1-s).
    const double q = p * (1.0 - s);
    const double diag_factor = 2.0 * std::pow(dx, q + 1.0) / (q * (q + 1.0));
    // Exterior: f = 0 outside the window.
    for (std::size_t i = 0; i < n; ++i) {
        const double x = x_first + static_cast<double>(i) * dx;
        total += pw(std::abs(slope[i])) * diag_factor;
        const double tails = std::pow(hi_edge - x, -sp) + std::pow(x - lo_edge, -sp);
        total += 2.0 * pw(std::abs(v[i])) * dx * tails / sp;
    }
    return total;
}

std::vector<double> central_slope(std::span<const double> v, double dx) {
    const std::size_t n = v.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? v[i - 1] : 0.0;
        const double right = i + 1 < n ? v[i + 1] : 0.0;
        d[i] = (right - left) / (2.0 * dx);
    }
    return d;
}

void validate_gagliardo(double s, double p) {
    if (!(s > 0.0 && s < 1.0)) {
        throw DomainError("Gagliardo seminorm needs s in (0, 1)");
    }
    if (!(p >= 1.0)) {
        throw DomainError("Gagliardo seminorm needs p >= 1");
    }
}

}  // namespace

double gagliardo_value(const SampledFunction& f, double s, double p) {
    validate_gagliardo(s, p);
    const auto v = f.values();
    const std::vector<double> slope = f.has_derivative()
                                          ? std::vector<double>(f.derivative_values().begin(),
                                                                f.derivative_values().end())
                                          : central_slope(v, f.spacing());
    const double total = gagliardo_pth_power(v, slope, f.lo_edge(), f.hi_edge(), f.x(0),
                                             f.spacing(), s, p);
    return std::pow(total, 1.0 / p);
}

GagliardoEstimate gagliardo_seminorm(const SampledFunction& f, double s, double p) {
    GagliardoEstimate est;
    est.value = gagliardo_value(f, s, p);
    std::vector<double> coarse;
    coarse.reserve(f.size() / 2 + 1);
    for (std::size_t i = 0; i < f.size(); i += 2) {
        coarse.push_back(f.values()[i]);
    }
    if (coarse.size() >= 2) {
        est.coarse_value = gagliardo_value(SampledFunction(f.x(0), 2.0 * f.spacing(), coarse), s, p);
    }
    if (est.value == 0.0 && est.coarse_value == 0.0) {
        est.converged = true;
        return est;
    }
    const double rel = std::abs(est.value - est.coarse_value) / std::max(est.value, est.coarse_value);
    est.converged = rel <= 0.05;
    est.divergent_trend = est.coarse_value > 0.0 && est.value >= 2.0 * est.coarse_value;
    return est;
}

// Wasserstein-1 -----------------------------------------------------------------

namespace {

// ∫_a^b |g(x) - c| dx for g linear from ga to gb.
double abs_linear_integral(double a, double b, double ga, double gb, double c) {
    const double len = b - a;
    if (len <= 0.0) {
        return 0.0;
    }
    const double da = ga - c;
    const double db = gb - c;
    if ((da >= 0.0 && db >= 0.0) || (da <= 0.0 && db <= 0.0)) {
        return 0.5 * std::abs(da + db) * len;
    }
    const double root = len * da / (da - db);
    return 0.5 * (std::abs(da) * root + std::abs(db) * (len - root));
}

void require_unit_mass(const GridField& u, const char* what) {
    if (std::abs(u.mass() - 1.0) > 1e-6) {
        throw InputError(std::string(what) + " must have unit mass (got " +
                         std::to_string(u.mass()) + ")");
    }
}

// Piecewise-linear CDF of a grid density (cell masses spread uniformly).
struct GridCdf {
    const GridField& u;
    std::vector<double> at_edge;

    explicit GridCdf(const GridField& field) : u(field), at_edge(field.n_cells() + 1, 0.0) {
        const double dx = u.cell_width();
        for (std::size_t i = 0; i < u.n_cells(); ++i) {
            at_edge[i + 1] = at_edge[i] + u[i] * dx;
        }
        const double total = at_edge.back();
        for (double& c : at_edge) {
            c /= total;
        }
    }

    double edge(std::size_t j) const { return u.lo() + static_cast<double>(j) * u.cell_width(); }

    double operator()(double x) const {
        const double pos = (x - u.lo()) / u.cell_width();
        if (pos <= 0.0) {
            return 0.0;
        }
        const std::size_t n = u.n_cells();
        if (pos >= static_cast<double>(n)) {
            return 1.0;
        }
        const auto j = static_cast<std::size_t>(pos);
        return at_edge[j] + (pos - static_cast<double>(j)) * (at_edge[j + 1] - at_edge[j]);
    }
};

}  // namespace

double w1_distance(std::span<const double> samples, const GridField& nu) {
    require_unit_mass(nu, "reference field");
    if (samples.empty()) {
        throw InputError("w1_distance needs at least one sample");
    }
    std::vector<double> xs(samples.begin(), samples.end());
    std::sort(xs.begin(), xs.end());
    const GridCdf cdf(nu);

    std::vector<double> breaks = xs;
    for (std::size_t j = 0; j <= nu.n_cells(); ++j) {
        breaks.push_back(cdf.edge(j));
    }
    std::sort(breaks.begin(), breaks.end());

    const double n = static_cast<double>(xs.size());
    double total = 0.0;
    std::size_t below = 0;  // samples <= current left break
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
        const double a = breaks[b];
        const double c = breaks[b + 1];
        while (below < xs.size() && xs[below] <= a) {
            ++below;
        }
        total += abs_linear_integral(a, c, cdf(a), cdf(c), static_cast<double>(below) / n);
    }
    return total;
}

double w1_distance(const GridField& mu, const GridField& nu) {
    require_unit_mass(mu, "first field");
    require_unit_mass(nu, "second field");
    const GridCdf fa(mu);
    const GridCdf fb(nu);
    std::vector<double> breaks;
    breaks.reserve(mu.n_cells() + nu.n_cells() + 2);
    for (std::size_t j = 0; j <= mu.n_cells(); ++j) {
        breaks.push_back(fa.edge(j));
    }
    for (std::size_t j = 0; j <= nu.n_cells(); ++j) {
        breaks.push_back(fb.edge(j));
    }
    std::sort(breaks.begin(), breaks.end());
    double total = 0.0;
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
        const double a = breaks[b];
        const double c = breaks[b + 1];
        total += abs_linear_integral(a, c, fa(a) - fb(a), fa(c) - fb(c), 0.0);
    }
    return total;
}

double w1_distance_samples(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw InputError("w1_distance_samples needs nonempty sample sets");
    }
    std::vector<double> xa(a.begin(), a.end());
    std::vector<double> xb(b.begin(), b.end());
    std::sort(xa.begin(), xa.end());
    std::sort(xb.begin(), xb.end());
    std::vector<double> breaks;
    breaks.reserve(xa.size() + xb.size());
    std::merge(xa.begin(), xa.end(), xb.begin(), xb.end(), std::back_inserter(breaks));
    const double na = static_cast<double>(xa.size());
    const double nb = static_cast<double>(xb.size());
    double total = 0.0;
    std::size_t ia = 0;
    std::size_t ib = 0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double x = breaks[k];
        while (ia < xa.size() && xa[ia] <= x) {
            ++ia;
        }
        while (ib < xb.size() && xb[ib] <= x) {
            ++ib;
        }
        total += std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb) *
                 (breaks[k + 1] - x);
    }
    return total;
}

double weighted_l1_norm(const GridField& u, const WeightFunction& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.n_cells(); ++i) {
        s += std::abs(u[i]) * w.phi(u.center(i));
    }
    return s * u.cell_width();
}

double entropy_of_field(const GridField& u, const NonlinearitySpec& spec) {
    double s = 0.0;
    for (double v : u.values()) {
        s += entropy_Psi(spec, v);
    }
    return s * u.cell_width();
}

}  // namespace nemytskii
