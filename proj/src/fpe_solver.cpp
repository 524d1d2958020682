#include "nemytskii/fpe_solver.hpp"

#include "nemytskii/csv.hpp"
#include "nemytskii/error.hpp"
#include "numerics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

namespace nemytskii {

void SolverConfig::validate(const DriftSpec& drift) const {
    if (!(epsilon_reg > 0.0 && epsilon_reg < 1.0)) {
        throw ConfigError("epsilon_reg must lie in (0, 1)");
    }
    if (!(lambda_step > 0.0)) {
        throw ConfigError("lambda_step must be positive");
    }
    const double l0 = lambda_zero(drift);
    if (std::isfinite(l0) && !(lambda_step < l0)) {
        throw ConfigError("lambda_step must be below lambda_0 = " + std::to_string(l0));
    }
    if (!(newton_tol > 0.0) || newton_max_iter < 1) {
        throw ConfigError("newton_tol must be positive and newton_max_iter >= 1");
    }
}

namespace {

// Discrete operator of one resolvent equation on a fixed grid.
class ResolventOperator {
public:
    ResolventOperator(const GridField& f, double lambda, const NonlinearitySpec& spec,
                      const DriftSpec& drift, const SolverConfig& config)
        : f_(f.values().begin(), f.values().end()),
          n_(f.n_cells()),
          dx_(f.cell_width()),
          lambda_(lambda),
          eps_(config.epsilon_reg),
          spec_(spec),
          drift_(drift),
          boundary_(config.boundary),
          transport_(!drift.is_driftless()),
          b_(n_), db_(n_), phi_(n_), dphi_(n_) {
        if (transport_) {
            // Face velocities; faces 0 and n are the domain ends.
            face_e_.resize(n_ + 1);
            for (std::size_t j = 0; j <= n_; ++j) {
                face_e_[j] = cutoff_E(drift_, eps_, f.lo() + static_cast<double>(j) * dx_);
            }
        }
    }

    std::size_t size() const noexcept { return n_; }

    // Evaluates β̃_ε, b_ε(u)u and their derivatives at u.
    void linearize(const std::vector<double>& u) {
        for (std::size_t i = 0; i < n_; ++i) {
            const double g = yosida_resolvent(spec_, eps_, u[i]);
            const double bp = spec_.beta_prime(g);
            b_[i] = spec_.beta(g) + eps_ * u[i];
            db_[i] = bp / (1.0 + eps_ * bp) + eps_;
            if (transport_) {
                const double bv = mollified_b(drift_, eps_, u[i]);
                phi_[i] = bv * u[i];
                dphi_[i] = bv + mollified_b_prime(drift_, eps_, u[i]) * u[i];
            }
        }
    }

    double residual(const std::vector<double>& u, std::vector<double>& r) {
        linearize(u);
        return residual_from_cache(u, r);
    }

    // Residual using the cached β̃_ε(u), φ(u) from the last linearize().
    double residual_from_cache(const std::vector<double>& u, std::vector<double>& r) const {
        const double cd = lambda_ / (dx_ * dx_);
        const double ca = lambda_ / dx_;
        double norm = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double left = i > 0 ? b_[i - 1] : ghost(b_[0]);
            const double right = i + 1 < n_ ? b_[i + 1] : ghost(b_[n_ - 1]);
            double ri = u[i] - f_[i] - cd * (right - 2.0 * b_[i] + left) + lambda_ * eps_ * b_[i];
            if (transport_) {
                ri += ca * (flux(i + 1) - flux(i));
            }
            r[i] = ri;
            norm += std::abs(ri);
        }
        return norm * dx_;
    }

    // Tridiagonal Jacobian at the last linearization point.
    void jacobian(std::vector<double>& sub, std::vector<double>& diag,
                  std::vector<double>& super) const {
        const double cd = lambda_ / (dx_ * dx_);
        const double ca = lambda_ / dx_;
        for (std::size_t i = 0; i < n_; ++i) {
            const bool reflect_left = i == 0 && boundary_ == BoundaryPolicy::zero_flux;
            const bool reflect_right = i + 1 == n_ && boundary_ == BoundaryPolicy::zero_flux;
            const double self = (reflect_left || reflect_right) ? ((reflect_left && reflect_right) ? 0.0 : 1.0)
                                                                : 2.0;
            diag[i] = 1.0 + cd * self * db_[i] + lambda_ * eps_ * db_[i];
            sub[i] = i > 0 ? -cd * db_[i - 1] : 0.0;
            super[i] = i + 1 < n_ ? -cd * db_[i + 1] : 0.0;
            if (transport_) {
                // flux(j) = E⁺_j φ(u_{j-1}) - E⁻_j φ(u_j) on interior faces
                const double e_right = i + 1 < n_ ? face_e_[i + 1] : 0.0;
                const double e_left = i > 0 ? face_e_[i] : 0.0;
                diag[i] += ca * (std::max(e_right, 0.0) + std::max(-e_left, 0.0)) * dphi_[i];
                if (boundary_ == BoundaryPolicy::dirichlet_zero) {
                    if (i + 1 == n_) {
                        diag[i] += ca * std::max(face_e_[n_], 0.0) * dphi_[i];
                    }
                    if (i == 0) {
                        diag[i] += ca * std::max(-face_e_[0], 0.0) * dphi_[i];
                    }
                }
                if (i + 1 < n_) {
                    super[i] -= ca * std::max(-e_right, 0.0) * dphi_[i + 1];
                }
                if (i > 0) {
                    sub[i] -= ca * std::max(e_left, 0.0) * dphi_[i - 1];
                }
            }
        }
    }

    // Secant coefficients for the fallback fixed point: β̃_ε(u) ≈ a u, φ(u) ≈ c u.
    void secant_system(const std::vector<double>& u, std::vector<double>& sub,
                       std::vector<double>& diag, std::vector<double>& super) {
        linearize(u);
        for (std::size_t i = 0; i < n_; ++i) {
            if (u[i] != 0.0) {
                db_[i] = b_[i] / u[i];
                if (transport_) {
                    dphi_[i] = phi_[i] / u[i];
                }
            } else if (transport_) {
                dphi_[i] = mollified_b(drift_, eps_, 0.0);
            }
        }
        jacobian(sub, diag, super);
    }

    const std::vector<double>& rhs() const noexcept { return f_; }
    double dx() const noexcept { return dx_; }

private:
    double ghost(double edge) const noexcept {
        return boundary_ == BoundaryPolicy::zero_flux ? edge : 0.0;
    }

    // Donor-cell flux through face j (between cells j-1 and j).
    double flux(std::size_t j) const noexcept {
        const double e = face_e_[j];
        if (j == 0 || j == n_) {
            if (boundary_ == BoundaryPolicy::zero_flux) {
                return 0.0;
            }
            // Outflow only; the exterior carries no mass.
            if (j == 0) {
                return std::min(e, 0.0) * phi_[0];
            }
            return std::max(e, 0.0) * phi_[n_ - 1];
        }
        return std::max(e, 0.0) * phi_[j - 1] - std::max(-e, 0.0) * phi_[j];
    }

    std::vector<double> f_;
    std::size_t n_;
    double dx_;
    double lambda_;
    double eps_;
    const NonlinearitySpec& spec_;
    const DriftSpec& drift_;
    BoundaryPolicy boundary_;
    bool transport_;
    std::vector<double> face_e_;
    std::vector<double> b_, db_, phi_, dphi_;
};

}  // namespace

ResolventResult resolvent_solve(const GridField& f, double lambda, const NonlinearitySpec& spec,
                                const DriftSpec& drift, const SolverConfig& config) {
    const double l0 = lambda_zero(drift);
    if (!(lambda > 0.0) || (std::isfinite(l0) && !(lambda < l0))) {
        throw DomainError("resolvent_solve needs lambda in (0, lambda_0)");
    }
    ResolventOperator op(f, lambda, spec, drift, config);
    const std::size_t n = op.size();
    std::vector<double> u(f.values().begin(), f.values().end());
    std::vector<double> r(n), trial(n), step(n), sub(n), diag(n), super(n);

    ResolventStats stats;
    double norm = op.residual(u, r);
    bool converged = norm <= config.newton_tol;

    for (int it = 0; !converged && it < config.newton_max_iter; ++it) {
        op.jacobian(sub, diag, super);
        for (std::size_t i = 0; i < n; ++i) {
            step[i] = -r[i];
        }
        detail::solve_tridiagonal(sub, diag, super, step);
        ++stats.newton_iterations;

        double alpha = 1.0;
        bool accepted = false;
        while (alpha >= 1.0 / 1024.0) {
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = u[i] + alpha * step[i];
            }
            const double trial_norm = op.residual(trial, r);
            if (trial_norm < norm || trial_norm <= config.newton_tol) {
                u.swap(trial);
                norm = trial_norm;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            norm = op.residual(u, r);
            break;
        }
        converged = norm <= config.newton_tol;
    }

    if (!converged) {
        // Damped (0.5) lagged-coefficient fixed point.
        const int max_fallback = 50 * config.newton_max_iter;
        for (int it = 0; it < max_fallback && !converged; ++it) {
            op.secant_system(u, sub, diag, super);
            step = op.rhs();
            detail::solve_tridiagonal(sub, diag, super, step);
            for (std::size_t i = 0; i < n; ++i) {
                u[i] = 0.5 * u[i] + 0.5 * step[i];
            }
            ++stats.fallback_iterations;
            norm = op.residual(u, r);
            converged = norm <= config.newton_tol;
        }
    }
    stats.residual_l1 = norm;
    if (!converged) {
        throw SolverError("resolvent Newton/fixed-point iteration did not converge (residual " +
                              std::to_string(norm) + ")",
                          norm);
    }

    double clipped = 0.0;
    for (double& v : u) {
        if (v < 0.0) {
            clipped -= v;
            v = 0.0;
        }
    }
    stats.clipped_mass = clipped * op.dx();
    if (stats.clipped_mass > config.max_clipped_mass) {
        throw SolverError("clipped negative mass " + std::to_string(stats.clipped_mass) +
                              " exceeds the limit",
                          norm);
    }
    return ResolventResult{GridField(f.lo(), f.hi(), std::move(u)), stats};
}

std::size_t step_count(double T, double h) {
    if (!(T > 0.0) || !(h > 0.0)) {
        return 0;
    }
    // Guard against T/h landing a hair above an integer.
    return static_cast<std::size_t>(std::ceil(T / h * (1.0 - 1e-12)));
}

GridField run_chain(const GridField& nu, double T, const SolverConfig& config,
                    const NonlinearitySpec& spec, const DriftSpec& drift,
                    const StepObserver& observer) {
    config.validate(drift);
    if (std::abs(nu.mass() - 1.0) > 1e-8) {
        throw InputError("initial field must have unit mass (got " + std::to_string(nu.mass()) + ")");
    }
    const double h = config.lambda_step;
    const std::size_t steps = step_count(T, h);
    GridField u = nu;
    for (std::size_t i = 1; i <= steps; ++i) {
        const double lambda = i < steps ? h : T - static_cast<double>(steps - 1) * h;
        StepRecord record;
        record.index = i;
        record.lambda = lambda;
        record.t = i < steps ? static_cast<double>(i) * h : T;
        try {
            auto result = resolvent_solve(u, lambda, spec, drift, config);
            record.stats = result.stats;
            u = std::move(result.field);
        } catch (const SolverError& e) {
            throw SolverError("step " + std::to_string(i) + ": " + e.what(), e.residual(), i);
        }
        if (observer) {
            observer(record, u);
        }
    }
    return u;
}

Trajectory step_chain(const GridField& nu, double T, const SolverConfig& config,
                      const NonlinearitySpec& spec, const DriftSpec& drift) {
    Trajectory traj{nu, {}, {}};
    run_chain(nu, T, config, spec, drift, [&](const StepRecord& rec, const GridField& u) {
        traj.steps.push_back(rec);
        traj.fields.push_back(u);
    });
    return traj;
}

double semigroup_distance(const GridField& nu1, const GridField& nu2, double T,
                          const SolverConfig& config, const NonlinearitySpec& spec,
                          const DriftSpec& drift) {
    const double d0 = l1_distance(nu1, nu2);
    if (d0 == 0.0) {
        return 0.0;
    }
    const Trajectory a = step_chain(nu1, T, config, spec, drift);
    const Trajectory b = step_chain(nu2, T, config, spec, drift);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.fields.size(); ++i) {
        worst = std::max(worst, l1_distance(a.fields[i], b.fields[i]) / d0);
    }
    return worst;
}

// Entropy audit -----------------------------------------------------------------

namespace {

double field_entropy(const GridField& u, const NonlinearitySpec& spec) {
    double s = 0.0;
    for (double v : u.values()) {
        s += entropy_Psi(spec, v);
    }
    return s * u.cell_width();
}

}  // namespace

double sqrt_beta_gradient_energy(const GridField& u, const NonlinearitySpec& spec) {
    const double dx = u.cell_width();
    double s = 0.0;
    double prev = std::sqrt(spec.beta(u[0]));
    for (std::size_t i = 1; i < u.n_cells(); ++i) {
        const double cur = std::sqrt(spec.beta(u[i]));
        const double d = (cur - prev) / dx;
        s += d * d;
        prev = cur;
    }
    return s * dx;
}

EntropyAuditor::EntropyAuditor(const GridField& nu, const NonlinearitySpec& spec)
    : spec_(&spec), initial_entropy_(field_entropy(nu, spec)) {}

const EntropyRecord& EntropyAuditor::add(const StepRecord& step, const GridField& u) {
    dissipation_ += step.lambda * sqrt_beta_gradient_energy(u, *spec_);
    EntropyRecord rec;
    rec.step = step.index;
    rec.t = step.t;
    rec.entropy = field_entropy(u, *spec_);
    rec.dissipation = dissipation_;
    rec.audit_value = rec.entropy + rec.dissipation - initial_entropy_;
    records_.push_back(rec);
    return records_.back();
}

std::vector<EntropyRecord> entropy_audit(const Trajectory& trajectory,
                                         const NonlinearitySpec& spec) {
    EntropyAuditor auditor(trajectory.initial, spec);
    for (std::size_t i = 0; i < trajectory.fields.size(); ++i) {
        auditor.add(trajectory.steps[i], trajectory.fields[i]);
    }
    return auditor.records();
}

// Export --------------------------------------------------------------------------

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) {
        bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    }
    out.write(bytes, 8);
}

void put_f64(std::ostream& out, double v) {
    put_u64(out, std::bit_cast<std::uint64_t>(v));
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    if (!in) {
        throw InputError("truncated binary trajectory");
    }
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = (v << 8) | bytes[i];
    }
    return v;
}

double get_f64(std::istream& in) {
    return std::bit_cast<double>(get_u64(in));
}

void write_csv_field(std::ostream& out, std::size_t step, double t, const GridField& u) {
    for (std::size_t i = 0; i < u.n_cells(); ++i) {
        out << step << ',' << format_double(t) << ',' << format_double(u.center(i)) << ','
            << format_double(u[i]) << '\n';
    }
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, std::size_t stride) {
    stride = std::max<std::size_t>(stride, 1);
    out << "step,t,cell_center,value\n";
    write_csv_field(out, 0, 0.0, trajectory.initial);
    for (std::size_t i = 0; i < trajectory.fields.size(); ++i) {
        const auto& rec = trajectory.steps[i];
        if (rec.index % stride == 0 || i + 1 == trajectory.fields.size()) {
            write_csv_field(out, rec.index, rec.t, trajectory.fields[i]);
        }
    }
}

void write_trajectory_binary(std::ostream& out, const Trajectory& trajectory) {
    const GridField& first = trajectory.initial;
    put_u64(out, first.n_cells());
    put_f64(out, first.lo());
    put_f64(out, first.hi());
    put_u64(out, trajectory.fields.size() + 1);
    auto put_record = [&](double t, const GridField& u) {
        put_f64(out, t);
        for (double v : u.values()) {
            put_f64(out, v);
        }
    };
    put_record(0.0, first);
    for (std::size_t i = 0; i < trajectory.fields.size(); ++i) {
        put_record(trajectory.steps[i].t, trajectory.fields[i]);
    }
}

BinaryTrajectory read_trajectory_binary(std::istream& in) {
    BinaryTrajectory traj;
    const std::uint64_t n = get_u64(in);
    traj.lo = get_f64(in);
    traj.hi = get_f64(in);
    const std::uint64_t records = get_u64(in);
    traj.times.reserve(records);
    traj.values.reserve(records);
    for (std::uint64_t r = 0; r < records; ++r) {
        traj.times.push_back(get_f64(in));
        std::vector<double> v(n);
        for (auto& x : v) {
            x = get_f64(in);
        }
        traj.values.push_back(std::move(v));
    }
    return traj;
}

}  // namespace nemytskii
