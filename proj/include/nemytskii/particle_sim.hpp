#pragma once

// Interacting particle approximation of
//     dX = E(X) b(u(X)) dt + sqrt(2β(u(X))/u(X)) dW,   u = density of X,
// by Euler-Maruyama with u replaced by a kernel density estimate frozen at
// the start of every step.

#include "nemytskii/coefficients.hpp"
#include "nemytskii/grid_field.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace nemytskii {

enum class KernelType { gaussian, epanechnikov };
enum class BandwidthRule { silverman, fixed };

/// K_h(z) = K(z/h)/h.
double kernel_value(KernelType kernel, double z, double h) noexcept;

struct SimConfig {
    std::size_t n_particles = 100000;
    double dt = 1e-3;
    double t0 = 0.1;
    double T = 1.0;
    KernelType kde = KernelType::epanechnikov;
    BandwidthRule bandwidth_rule = BandwidthRule::silverman;
    double fixed_bandwidth = 0.0;
    std::uint64_t seed = 0;
    /// Histogram / W1 snapshots; T is always included.
    std::vector<double> snapshot_times;
    double domain_bound = 10.0;
    std::size_t histogram_bins = 80;
    double histogram_lo = -4.0;
    double histogram_hi = 4.0;
    double coupling_delta = 1e-6;

    /// Throws ConfigError on the first violated constraint.
    void validate() const;
};

struct ParticleEnsemble {
    std::vector<double> positions;
    double t = 0.0;
    std::uint64_t step = 0;  ///< number of completed steps, keys the noise
    std::uint64_t seed = 0;
    double bandwidth = 0.0;
    KernelType kernel = KernelType::epanechnikov;

    std::size_t size() const noexcept { return positions.size(); }
    double mean() const noexcept;
    double variance() const noexcept;  ///< population variance, 1/N
};

/// Silverman's 1.06 σ̂ N^{-1/5}, floored at twice the mean interparticle
/// spacing.
double silverman_bandwidth(std::span<const double> positions);
double select_bandwidth(const SimConfig& config, std::span<const double> positions);

/// Inverse-CDF sampling of `density` on [lo, hi] via a 65536-cell trapezoid
/// CDF. Throws InputError if the density's mass differs from 1 by > 1e-6.
ParticleEnsemble seed_from_density(const std::function<double(double)>& density, double lo,
                                   double hi, std::size_t n, std::uint64_t seed, double t0 = 0.0);

/// Direct (1/N) Σ K_h(x - X_i).
double kde_density(const ParticleEnsemble& ensemble, double x);

/// Binned KDE on a grid of spacing h/16 with linear binning and linear
/// interpolation; read-only once built.
class DensitySnapshot {
public:
    DensitySnapshot(std::span<const double> positions, double bandwidth, KernelType kernel);

    double operator()(double x) const noexcept;
    double max_value() const noexcept { return max_value_; }
    /// ∫ û; equals 1 up to rounding.
    double mass() const noexcept;

private:
    double lo_ = 0.0;
    double dx_ = 1.0;
    std::vector<double> nodes_;
    double max_value_ = 0.0;
};

/// E(x) b(u) dt + sqrt(σ²(u) dt) ξ with the σ²(0) = 2β'(0) convention.
double particle_increment(double x, double u_hat, double dt, double xi,
                          const NonlinearitySpec& spec, const DriftSpec& drift);

struct StepStats {
    std::size_t clamped = 0;      ///< evaluations where û hit the clamp
    double max_clamp_ratio = 0.0;  ///< max û / clamp level among those
};

/// One Euler-Maruyama step. û is clamped at `clamp_level` before the
/// coefficients are evaluated; pass +inf to disable. Throws SimulationError
/// on a non-finite position.
ParticleEnsemble em_step(const ParticleEnsemble& ensemble, double dt, const NonlinearitySpec& spec,
                         const DriftSpec& drift,
                         double clamp_level = std::numeric_limits<double>::infinity(),
                         StepStats* stats = nullptr);

/// As em_step, but with a prescribed density snapshot (coupling runs).
ParticleEnsemble em_step_with(const ParticleEnsemble& ensemble, const DensitySnapshot& u_hat,
                              double dt, const NonlinearitySpec& spec, const DriftSpec& drift,
                              double clamp_level, StepStats* stats = nullptr);

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> density;  ///< count / (N · bin width)
};

Histogram make_histogram(std::span<const double> positions, double lo, double hi, std::size_t bins);

struct StatRecord {
    std::size_t step = 0;
    double t = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    double bandwidth = 0.0;
};

struct Snapshot {
    double t = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    Histogram histogram;
    std::optional<double> w1_to_reference;
};

struct SimResult {
    ParticleEnsemble final_ensemble;
    std::vector<StatRecord> series;  ///< one record per step, step 0 included
    std::vector<Snapshot> snapshots;
    double clamp_level = 0.0;
    std::size_t clamped_evaluations = 0;
    double max_clamp_ratio = 0.0;
};

/// Reference density at time t on a grid (unit mass), for W1 rows.
using ReferenceProfile = std::function<GridField(double t)>;

/// Sees the ensemble at t0 and after every step.
using EnsembleObserver = std::function<void(const ParticleEnsemble&)>;

/// Advances `initial` (positioned at config.t0) to config.T.
SimResult run(const SimConfig& config, const NonlinearitySpec& spec, const DriftSpec& drift,
              ParticleEnsemble initial, const ReferenceProfile& reference = {},
              const EnsembleObserver& observer = {});

struct CouplingRecord {
    double t = 0.0;
    double sup_distance = 0.0;
    double f_delta_mean = 0.0;  ///< mean of ln(Z²/δ² + 1)
};

/// Two ensembles with identical noise, the second shifted by `perturbation`,
/// both driven by the KDE of the first.
std::vector<CouplingRecord> coupling_experiment(const SimConfig& config,
                                                const NonlinearitySpec& spec,
                                                const DriftSpec& drift,
                                                const ParticleEnsemble& initial,
                                                double perturbation);

/// Least-squares slope of ln(variance) against ln(t).
double variance_loglog_slope(std::span<const StatRecord> series);

}  // namespace nemytskii
