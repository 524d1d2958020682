#include "nemytskii/particle_sim.hpp"

#include "nemytskii/analysis.hpp"
#include "nemytskii/error.hpp"
#include "nemytskii/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace nemytskii {

namespace {

constexpr int kNodesPerBandwidth = 16;

double kernel_support(KernelType kernel) noexcept {
    return kernel == KernelType::epanechnikov ? 1.0 : 4.0;
}

std::size_t time_steps(double span, double dt) {
    return static_cast<std::size_t>(std::ceil(span / dt * (1.0 - 1e-12)));
}

}  // namespace

double kernel_value(KernelType kernel, double z, double h) noexcept {
    const double u = z / h;
    if (kernel == KernelType::gaussian) {
        return std::exp(-0.5 * u * u) / (std::sqrt(2.0 * std::numbers::pi) * h);
    }
    return std::abs(u) < 1.0 ? 0.75 * (1.0 - u * u) / h : 0.0;
}

void SimConfig::validate() const {
    if (n_particles < 100) {
        throw ConfigError("n_particles must be at least 100");
    }
    if (!(dt > 0.0)) {
        throw ConfigError("dt must be positive");
    }
    if (!(t0 >= 0.0) || !(t0 < T)) {
        throw ConfigError("need 0 <= t0 < T");
    }
    if (bandwidth_rule == BandwidthRule::fixed && !(fixed_bandwidth > 0.0)) {
        throw ConfigError("fixed bandwidth must be positive");
    }
    if (!(domain_bound > 0.0)) {
        throw ConfigError("domain_bound must be positive");
    }
    if (histogram_bins == 0 || !(histogram_hi > histogram_lo)) {
        throw ConfigError("histogram needs bins > 0 and lo < hi");
    }
    if (!(coupling_delta > 0.0)) {
        throw ConfigError("coupling_delta must be positive");
    }
}

double ParticleEnsemble::mean() const noexcept {
    double s = 0.0;
    for (double x : positions) {
        s += x;
    }
    return s / static_cast<double>(positions.size());
}

double ParticleEnsemble::variance() const noexcept {
    const double mu = mean();
    double s = 0.0;
    for (double x : positions) {
        s += (x - mu) * (x - mu);
    }
    return s / static_cast<double>(positions.size());
}

double silverman_bandwidth(std::span<const double> positions) {
    const std::size_t n = positions.size();
    if (n < 2) {
        throw InputError("bandwidth selection needs at least two particles");
    }
    double mu = 0.0;
    double lo = positions[0];
    double hi = positions[0];
    for (double x : positions) {
        mu += x;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    mu /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : positions) {
        ss += (x - mu) * (x - mu);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const double rule = 1.06 * sd * std::pow(static_cast<double>(n), -0.2);
    const double floor = 2.0 * (hi - lo) / static_cast<double>(n - 1);
    const double h = std::max(rule, floor);
    if (!(h > 0.0)) {
        throw InputError("all particles coincide; Silverman bandwidth is zero");
    }
    return h;
}

double select_bandwidth(const SimConfig& config, std::span<const double> positions) {
    return config.bandwidth_rule == BandwidthRule::fixed ? config.fixed_bandwidth
                                                         : silverman_bandwidth(positions);
}

ParticleEnsemble seed_from_density(const std::function<double(double)>& density, double lo,
                                   double hi, std::size_t n, std::uint64_t seed, double t0) {
    if (!(hi > lo)) {
        throw InputError("seeding window needs lo < hi");
    }
    if (n == 0) {
        throw InputError("cannot seed an empty ensemble");
    }
    constexpr std::size_t cells = 65536;
    const double dx = (hi - lo) / static_cast<double>(cells);
    std::vector<double> f(cells + 1);
    for (std::size_t j = 0; j <= cells; ++j) {
        f[j] = density(lo + static_cast<double>(j) * dx);
        if (!(f[j] >= 0.0) || !std::isfinite(f[j])) {
            throw InputError("density is negative or not finite at x = " +
                             std::to_string(lo + static_cast<double>(j) * dx));
        }
    }
    std::vector<double> cdf(cells + 1, 0.0);
    for (std::size_t j = 0; j < cells; ++j) {
        cdf[j + 1] = cdf[j] + 0.5 * (f[j] + f[j + 1]) * dx;
    }
    const double mass = cdf.back();
    if (std::abs(mass - 1.0) > 1e-6) {
        throw InputError("density mass " + std::to_string(mass) + " deviates from 1 by more than 1e-6");
    }

    const CounterRng rng(seed);
    ParticleEnsemble ens;
    ens.positions.resize(n);
    ens.t = t0;
    ens.seed = seed;
    for (std::size_t i = 0; i < n; ++i) {
        const double target = rng.uniform(i, CounterRng::kSeedingStep) * mass;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
        const std::size_t j = std::clamp<std::size_t>(
            static_cast<std::size_t>(it - cdf.begin()), 1, cells) - 1;
        // Within the cell the CDF is quadratic; invert it exactly.
        const double a = f[j];
        const double slope = (f[j + 1] - f[j]) / dx;
        const double need = target - cdf[j];
        double s = 0.0;
        if (std::abs(slope) * dx > 1e-12 * std::max(a, 1e-300)) {
            const double disc = std::max(a * a + 2.0 * slope * need, 0.0);
            s = 2.0 * need / (a + std::sqrt(disc));
        } else if (a > 0.0) {
            s = need / a;
        }
        ens.positions[i] = lo + static_cast<double>(j) * dx + std::clamp(s, 0.0, dx);
    }
    return ens;
}

double kde_density(const ParticleEnsemble& ensemble, double x) {
    double s = 0.0;
    for (double xi : ensemble.positions) {
        s += kernel_value(ensemble.kernel, x - xi, ensemble.bandwidth);
    }
    return s / static_cast<double>(ensemble.size());
}

DensitySnapshot::DensitySnapshot(std::span<const double> positions, double bandwidth,
                                 KernelType kernel) {
    if (!(bandwidth > 0.0)) {
        throw InputError("KDE bandwidth must be positive");
    }
    if (positions.empty()) {
        throw InputError("KDE needs at least one particle");
    }
    const auto [mn, mx] = std::minmax_element(positions.begin(), positions.end());
    dx_ = bandwidth / kNodesPerBandwidth;
    const int taps = static_cast<int>(kernel_support(kernel) * kNodesPerBandwidth);
    lo_ = *mn - (taps + 2) * dx_;
    const auto n_nodes =
        static_cast<std::size_t>(std::ceil((*mx - lo_) / dx_)) + static_cast<std::size_t>(taps) + 3;

    std::vector<double> weights(n_nodes, 0.0);
    for (double x : positions) {
        const double p = (x - lo_) / dx_;
        const auto j = static_cast<std::size_t>(p);
        const double frac = p - static_cast<double>(j);
        weights[j] += 1.0 - frac;
        weights[j + 1] += frac;
    }

    std::vector<double> kern(static_cast<std::size_t>(2 * taps + 1));
    double ksum = 0.0;
    for (int k = -taps; k <= taps; ++k) {
        const double v = kernel_value(kernel, k * dx_, bandwidth);
        kern[static_cast<std::size_t>(k + taps)] = v;
        ksum += v;
    }
    // Discrete taps sum to exactly one unit of mass.
    const double scale = 1.0 / (ksum * dx_ * static_cast<double>(positions.size()));
    for (double& v : kern) {
        v *= scale;
    }

    nodes_.assign(n_nodes, 0.0);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n_nodes; ++i) {
        double acc = 0.0;
        for (int k = -taps; k <= taps; ++k) {
            const auto src = static_cast<std::ptrdiff_t>(i) - k;
            if (src >= 0 && src < static_cast<std::ptrdiff_t>(n_nodes)) {
                acc += weights[static_cast<std::size_t>(src)] * kern[static_cast<std::size_t>(k + taps)];
            }
        }
        nodes_[i] = acc;
    }
    max_value_ = *std::max_element(nodes_.begin(), nodes_.end());
}

double DensitySnapshot::operator()(double x) const noexcept {
    const double p = (x - lo_) / dx_;
    if (!(p >= 0.0) || p >= static_cast<double>(nodes_.size() - 1)) {
        return 0.0;
    }
    const auto j = static_cast<std::size_t>(p);
    const double frac = p - static_cast<double>(j);
    return (1.0 - frac) * nodes_[j] + frac * nodes_[j + 1];
}

double DensitySnapshot::mass() const noexcept {
    double s = 0.0;
    for (double v : nodes_) {
        s += v;
    }
    return s * dx_;
}

double particle_increment(double x, double u_hat, double dt, double xi,
                          const NonlinearitySpec& spec, const DriftSpec& drift) {
    double inc = 0.0;
    if (!drift.is_driftless()) {
        inc += drift.E.value(x) * drift.b.value(u_hat) * dt;
    }
    const double s2 = sigma_squared(spec, u_hat);
    if (s2 > 0.0) {
        inc += std::sqrt(s2 * dt) * xi;
    }
    return inc;
}

ParticleEnsemble em_step_with(const ParticleEnsemble& ensemble, const DensitySnapshot& u_hat,
                              double dt, const NonlinearitySpec& spec, const DriftSpec& drift,
                              double clamp_level, StepStats* stats) {
    if (!(dt > 0.0)) {
        throw InputError("dt must be positive");
    }
    const CounterRng rng(ensemble.seed);
    const std::size_t n = ensemble.size();
    ParticleEnsemble next = ensemble;
    std::vector<double> clamp_ratio(stats ? n : 0, 0.0);

#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        const double x = ensemble.positions[i];
        double u = u_hat(x);
        if (u > clamp_level) {
            if (stats) {
                clamp_ratio[i] = u / clamp_level;
            }
            u = clamp_level;
        }
        next.positions[i] = x + particle_increment(x, u, dt, rng.normal(i, ensemble.step), spec, drift);
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(next.positions[i])) {
            throw SimulationError("non-finite particle position after step " +
                                      std::to_string(ensemble.step + 1),
                                  i);
        }
    }
    if (stats) {
        for (double r : clamp_ratio) {
            if (r > 0.0) {
                ++stats->clamped;
                stats->max_clamp_ratio = std::max(stats->max_clamp_ratio, r);
            }
        }
    }
    next.t = ensemble.t + dt;
    next.step = ensemble.step + 1;
    return next;
}

ParticleEnsemble em_step(const ParticleEnsemble& ensemble, double dt, const NonlinearitySpec& spec,
                         const DriftSpec& drift, double clamp_level, StepStats* stats) {
    const DensitySnapshot u_hat(ensemble.positions, ensemble.bandwidth, ensemble.kernel);
    return em_step_with(ensemble, u_hat, dt, spec, drift, clamp_level, stats);
}

Histogram make_histogram(std::span<const double> positions, double lo, double hi, std::size_t bins) {
    if (bins == 0 || !(hi > lo)) {
        throw InputError("histogram needs bins > 0 and lo < hi");
    }
    Histogram h{lo, hi, std::vector<double>(bins, 0.0)};
    const double width = (hi - lo) / static_cast<double>(bins);
    for (double x : positions) {
        if (x >= lo && x < hi) {
            const auto b = std::min(static_cast<std::size_t>((x - lo) / width), bins - 1);
            h.density[b] += 1.0;
        }
    }
    const double norm = 1.0 / (static_cast<double>(positions.size()) * width);
    for (double& v : h.density) {
        v *= norm;
    }
    return h;
}

namespace {

void watchdog(const ParticleEnsemble& ens, double bound) {
    for (std::size_t i = 0; i < ens.size(); ++i) {
        if (std::abs(ens.positions[i]) > 10.0 * bound) {
            throw SimulationError("particle escaped beyond 10x the domain bound at t = " +
                                      std::to_string(ens.t),
                                  i);
        }
    }
}

StatRecord stat_record(const ParticleEnsemble& ens) {
    return StatRecord{ens.step, ens.t, ens.mean(), ens.variance(), ens.bandwidth};
}

}  // namespace

SimResult run(const SimConfig& config, const NonlinearitySpec& spec, const DriftSpec& drift,
              ParticleEnsemble initial, const ReferenceProfile& reference,
              const EnsembleObserver& observer) {
    config.validate();
    if (initial.size() < 100) {
        throw InputError("ensemble needs at least 100 particles");
    }
    initial.kernel = config.kde;
    initial.seed = config.seed;
    initial.t = config.t0;
    initial.step = 0;
    initial.bandwidth = select_bandwidth(config, initial.positions);

    std::vector<double> targets = config.snapshot_times;
    targets.push_back(config.T);
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    std::size_t next_target = 0;

    SimResult result;
    {
        const DensitySnapshot first(initial.positions, initial.bandwidth, initial.kernel);
        result.clamp_level = 2.0 * first.max_value();
    }

    auto take_snapshots = [&](const ParticleEnsemble& ens, bool last) {
        while (next_target < targets.size() &&
               (last || ens.t >= targets[next_target] - 1e-9 * config.dt)) {
            Snapshot snap;
            snap.t = ens.t;
            snap.mean = ens.mean();
            snap.variance = ens.variance();
            snap.histogram = make_histogram(ens.positions, config.histogram_lo, config.histogram_hi,
                                            config.histogram_bins);
            if (reference) {
                snap.w1_to_reference = w1_distance(ens.positions, reference(ens.t));
            }
            result.snapshots.push_back(std::move(snap));
            ++next_target;
            if (last) {
                break;
            }
        }
    };

    ParticleEnsemble ens = std::move(initial);
    watchdog(ens, config.domain_bound);
    result.series.push_back(stat_record(ens));
    take_snapshots(ens, false);
    if (observer) {
        observer(ens);
    }

    const std::size_t steps = time_steps(config.T - config.t0, config.dt);
    for (std::size_t i = 1; i <= steps; ++i) {
        const double dt =
            i < steps ? config.dt : (config.T - config.t0) - static_cast<double>(steps - 1) * config.dt;
        StepStats stats;
        ens = em_step(ens, dt, spec, drift, result.clamp_level, &stats);
        ens.t = i < steps ? config.t0 + static_cast<double>(i) * config.dt : config.T;
        result.clamped_evaluations += stats.clamped;
        result.max_clamp_ratio = std::max(result.max_clamp_ratio, stats.max_clamp_ratio);
        watchdog(ens, config.domain_bound);
        ens.bandwidth = select_bandwidth(config, ens.positions);
        result.series.push_back(stat_record(ens));
        take_snapshots(ens, i == steps);
        if (observer) {
            observer(ens);
        }
    }
    result.final_ensemble = std::move(ens);
    return result;
}

std::vector<CouplingRecord> coupling_experiment(const SimConfig& config,
                                                const NonlinearitySpec& spec,
                                                const DriftSpec& drift,
                                                const ParticleEnsemble& initial,
                                                double perturbation) {
    config.validate();
    if (!(perturbation >= 0.0)) {
        throw InputError("perturbation must be nonnegative");
    }
    ParticleEnsemble x = initial;
    x.kernel = config.kde;
    x.seed = config.seed;
    x.t = config.t0;
    x.step = 0;
    ParticleEnsemble y = x;
    for (double& p : y.positions) {
        p += perturbation;
    }
    const double delta = config.coupling_delta;
    auto record = [&](double t) {
        CouplingRecord r;
        r.t = t;
        double f_sum = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double z = x.positions[i] - y.positions[i];
            r.sup_distance = std::max(r.sup_distance, std::abs(z));
            f_sum += std::log1p((z / delta) * (z / delta));
        }
        r.f_delta_mean = f_sum / static_cast<double>(x.size());
        return r;
    };

    double clamp_level = 0.0;
    {
        const DensitySnapshot first(x.positions, select_bandwidth(config, x.positions), x.kernel);
        clamp_level = 2.0 * first.max_value();
    }
    std::vector<CouplingRecord> out;
    out.push_back(record(config.t0));
    const std::size_t steps = time_steps(config.T - config.t0, config.dt);
    for (std::size_t i = 1; i <= steps; ++i) {
        const double dt =
            i < steps ? config.dt : (config.T - config.t0) - static_cast<double>(steps - 1) * config.dt;
        x.bandwidth = select_bandwidth(config, x.positions);
        const DensitySnapshot u_hat(x.positions, x.bandwidth, x.kernel);
        y = em_step_with(y, u_hat, dt, spec, drift, clamp_level);
        x = em_step_with(x, u_hat, dt, spec, drift, clamp_level);
        const double t = i < steps ? config.t0 + static_cast<double>(i) * config.dt : config.T;
        x.t = t;
        y.t = t;
        watchdog(x, config.domain_bound);
        watchdog(y, config.domain_bound);
        out.push_back(record(t));
    }
    return out;
}

double variance_loglog_slope(std::span<const StatRecord> series) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    double n = 0.0;
    for (const auto& r : series) {
        if (!(r.t > 0.0) || !(r.variance > 0.0)) {
            continue;
        }
        const double lx = std::log(r.t);
        const double ly = std::log(r.variance);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        n += 1.0;
    }
    if (n < 2.0) {
        throw InputError("variance slope needs at least two positive-time records");
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace nemytskii
