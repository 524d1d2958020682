#pragma once

// Implicit (Crandall-Liggett) time stepping for
//     ∂ₜu + div(E b(u) u) - Δβ(u) = 0
// on a truncated 1-D grid. Each step solves the ε-regularized resolvent
// equation u + λA_ε(u) = f with a damped Newton iteration.

#include "nemytskii/coefficients.hpp"
#include "nemytskii/grid_field.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

namespace nemytskii {

enum class BoundaryPolicy { zero_flux, dirichlet_zero };

struct SolverConfig {
    double lambda_step = 1e-3;
    double epsilon_reg = 1e-10;
    double newton_tol = 1e-12;
    int newton_max_iter = 50;
    BoundaryPolicy boundary = BoundaryPolicy::zero_flux;
    /// A step whose negative undershoot exceeds this mass fails.
    double max_clipped_mass = 1e-6;

    /// Throws ConfigError unless 0 < lambda_step < λ₀ and ε ∈ (0, 1).
    void validate(const DriftSpec& drift) const;
};

struct ResolventStats {
    int newton_iterations = 0;
    int fallback_iterations = 0;
    double residual_l1 = 0.0;
    double clipped_mass = 0.0;
};

struct ResolventResult {
    GridField field;
    ResolventStats stats;
};

/// Solves u - λΔ_h β̃_ε(u) + λεβ̃_ε(u) + λ div_h(E_ε b_ε(u) u) = f.
/// Δ_h is the 3-point Laplacian, div_h a donor-cell flux divergence.
/// Negative undershoot is clipped to 0 and reported.
ResolventResult resolvent_solve(const GridField& f, double lambda, const NonlinearitySpec& spec,
                                const DriftSpec& drift, const SolverConfig& config);

struct StepRecord {
    std::size_t index = 0;  ///< 1-based step number
    double t = 0.0;         ///< time after the step
    double lambda = 0.0;    ///< step length used
    ResolventStats stats;
};

struct Trajectory {
    GridField initial;
    std::vector<StepRecord> steps;
    std::vector<GridField> fields;  ///< fields[i] is u_h after steps[i]

    const GridField& final_field() const { return fields.empty() ? initial : fields.back(); }
};

/// Called after every completed step with the new field.
using StepObserver = std::function<void(const StepRecord&, const GridField&)>;

/// Number of implicit steps to reach T with nominal step h; the last step
/// may be shorter.
std::size_t step_count(double T, double h);

/// Runs the chain u_h^{i+1} + h A(u_h^{i+1}) = u_h^i from ν to T and returns
/// the final field. Requires mass(ν) = 1 ± 1e-8.
GridField run_chain(const GridField& nu, double T, const SolverConfig& config,
                    const NonlinearitySpec& spec, const DriftSpec& drift,
                    const StepObserver& observer = {});

/// As run_chain, keeping every step.
Trajectory step_chain(const GridField& nu, double T, const SolverConfig& config,
                      const NonlinearitySpec& spec, const DriftSpec& drift);

/// max over steps of ‖u_h(t) - ū_h(t)‖₁ / ‖ν - ν̄‖₁ (0 when ν = ν̄).
double semigroup_distance(const GridField& nu1, const GridField& nu2, double T,
                          const SolverConfig& config, const NonlinearitySpec& spec,
                          const DriftSpec& drift);

// Entropy audit -----------------------------------------------------------------

struct EntropyRecord {
    std::size_t step = 0;
    double t = 0.0;
    double entropy = 0.0;      ///< Σ Ψ(u_i) Δx
    double dissipation = 0.0;  ///< Σ_s h_s Σ_i |D⁺β^{1/2}(u_s)|² Δx, cumulative
    double audit_value = 0.0;  ///< entropy + dissipation - entropy(ν)
};

/// Online form of the audit, fed one step at a time.
class EntropyAuditor {
public:
    EntropyAuditor(const GridField& nu, const NonlinearitySpec& spec);

    const EntropyRecord& add(const StepRecord& step, const GridField& u);
    double initial_entropy() const noexcept { return initial_entropy_; }
    const std::vector<EntropyRecord>& records() const noexcept { return records_; }

private:
    const NonlinearitySpec* spec_;
    double initial_entropy_;
    double dissipation_ = 0.0;
    std::vector<EntropyRecord> records_;
};

std::vector<EntropyRecord> entropy_audit(const Trajectory& trajectory, const NonlinearitySpec& spec);

/// Σ_i |D⁺β^{1/2}(u)_i|² Δx with forward differences.
double sqrt_beta_gradient_energy(const GridField& u, const NonlinearitySpec& spec);

// Export --------------------------------------------------------------------------

/// Columns step,t,cell_center,value; step 0 is the initial field. Every
/// `stride`-th step is written, and always the last one.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, std::size_t stride = 1);

/// Little-endian layout:
///   u64 n_cells, f64 lo, f64 hi, u64 n_records,
///   then per record: f64 t, f64 values[n_cells].
/// Record 0 is the initial field at t = 0.
void write_trajectory_binary(std::ostream& out, const Trajectory& trajectory);

struct BinaryTrajectory {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> times;
    std::vector<std::vector<double>> values;
};

BinaryTrajectory read_trajectory_binary(std::istream& in);

}  // namespace nemytskii
