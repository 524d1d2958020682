#include "nemytskii/scenarios.hpp"

#include "nemytskii/analysis.hpp"
#include "nemytskii/closed_form.hpp"
#include "nemytskii/csv.hpp"
#include "nemytskii/fpe_solver.hpp"
#include "nemytskii/particle_sim.hpp"
#include "nemytskii/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <map>
#include <memory>
#include <numbers>

namespace nemytskii {

namespace {

namespace fs = std::filesystem;

class Artifacts {
public:
    explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {}

    std::ofstream& open(const std::string& name) {
        auto& slot = files_[name];
        if (!slot) {
            slot = std::make_unique<std::ofstream>(dir_ / (name + ".partial"),
                                                   std::ios::binary | std::ios::trunc);
            if (!*slot) {
                throw InputError("cannot write " + (dir_ / (name + ".partial")).string());
            }
        }
        return *slot;
    }

    /// Closes everything; renames only when `finished`.
    std::vector<fs::path> close(bool finished) {
        std::vector<fs::path> out;
        for (auto& [name, stream] : files_) {
            stream->flush();
            stream->close();
            const fs::path partial = dir_ / (name + ".partial");
            if (finished) {
                const fs::path final_path = dir_ / name;
                fs::rename(partial, final_path);
                out.push_back(final_path);
            } else {
                out.push_back(partial);
            }
        }
        files_.clear();
        return out;
    }

private:
    fs::path dir_;
    std::map<std::string, std::unique_ptr<std::ofstream>> files_;
};

void csv_row(std::ostream& out, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        out << (first ? "" : ",") << format_double(v);
        first = false;
    }
    out << '\n';
}

std::uint64_t effective_seed(const Scenario& sc, const RunOptions& opt) {
    return opt.seed_override ? *opt.seed_override : static_cast<std::uint64_t>(sc.integer("seed"));
}

bool has_closed_form(const Scenario& sc, const NonlinearitySpec& spec, const DriftSpec& drift) {
    return spec.is_power_law() && drift.is_driftless() && sc.integer("d") == 1;
}

/// C with ∫(C - k|y|²)₊^{1/(m-1)} dy = 1 over ℝ^d, via the Beta function.
double c_norm_closed_form(const BarenblattParams& bb) {
    const double q = 1.0 / (bb.m - 1.0);
    const double half_d = 0.5 * bb.d;
    const double rhs = std::pow(bb.k, half_d) * std::tgamma(half_d) /
                       (std::pow(std::numbers::pi, half_d) * std::beta(half_d, q + 1.0));
    return std::pow(rhs, 1.0 / (q + half_d));
}

struct Context {
    const Scenario& sc;
    const RunOptions& opt;
    DiagnosticsReport& rep;
    Artifacts& art;
    NonlinearitySpec spec;
    DriftSpec drift;
};

// barenblatt-verify -----------------------------------------------------------

void run_barenblatt_verify(Context& c) {
    const auto d = static_cast<int>(c.sc.integer("d"));
    const double m = c.sc.real("m");
    const auto bb = make_barenblatt(d, m, c.sc.real("x0"));

    const double dd = d;
    const double alpha = dd / (dd * (m - 1.0) + 2.0);
    c.rep.near("exponent.alpha", alpha, bb.alpha, 1e-15);
    c.rep.near("exponent.k", alpha * (m - 1.0) / (2.0 * m * dd), bb.k, 1e-15);
    c.rep.near("exponent.beta", alpha / dd, bb.beta_ss, 1e-15);
    c.rep.near("c_norm.closed_form", c_norm_closed_form(bb), bb.c_norm, 1e-9);

    const double m2_one = barenblatt_moment2(bb, 1.0);
    auto& prof = c.art.open("profile.csv");
    prof << "t,x,u\n";
    const auto points = static_cast<std::size_t>(c.sc.integer("profile_points"));
    for (double t : c.sc.reals("times")) {
        const std::string tag = format_double(t);
        c.rep.near("mass.t=" + tag, 1.0, barenblatt_mass(bb, t), 1e-9);
        const double scaled = m2_one * std::pow(t, 2.0 * bb.beta_ss);
        c.rep.near("moment2_scaling.t=" + tag, scaled, barenblatt_moment2(bb, t), 1e-9 * scaled);
        const double R = bb.support_radius(t);
        const double a = d == 1 ? bb.x0 - 1.1 * R : 0.0;
        const double b = d == 1 ? bb.x0 + 1.1 * R : 1.1 * R;
        for (std::size_t i = 0; i < points; ++i) {
            const double x = points == 1 ? a
                                         : a + (b - a) * static_cast<double>(i) /
                                                   static_cast<double>(points - 1);
            csv_row(prof, {t, x, barenblatt_eval(bb, t, x)});
        }
    }
}

// Grid solver -------------------------------------------------------------------

SolverConfig solver_config(const Scenario& sc) {
    SolverConfig cfg;
    cfg.lambda_step = sc.real("lambda");
    cfg.epsilon_reg = sc.real("epsilon");
    cfg.newton_tol = sc.real("newton_tol");
    cfg.boundary = sc.text("boundary") == "dirichlet-zero" ? BoundaryPolicy::dirichlet_zero
                                                           : BoundaryPolicy::zero_flux;
    return cfg;
}

GridField run_grid(Context& c, bool write_trajectory) {
    const double t0 = c.sc.real("t0");
    const double T = c.sc.real("T");
    const double lo = c.sc.real("lo");
    const double hi = c.sc.real("hi");
    const auto cells = static_cast<std::size_t>(c.sc.integer("cells"));
    const auto bb = make_barenblatt(1, c.sc.real("m"), c.sc.real("x0"));
    const GridField nu =
        GridField::sample(lo, hi, cells, [&](double x) { return barenblatt_eval(bb, t0, x); })
            .normalized();
    const SolverConfig cfg = solver_config(c.sc);
    cfg.validate(c.drift);

    const bool driftless = c.drift.is_driftless();
    const double K = c.drift.drift_bound();
    const double nu_linf = nu.linf_norm();
    const auto stride = static_cast<std::size_t>(c.sc.integer("trajectory_stride"));
    const std::size_t steps = step_count(T - t0, cfg.lambda_step);

    std::ostream* traj = nullptr;
    if (write_trajectory) {
        traj = &c.art.open("trajectory.csv");
        *traj << "step,t,cell_center,value\n";
        for (std::size_t i = 0; i < nu.n_cells(); ++i) {
            *traj << "0," << format_double(t0) << ',' << format_double(nu.center(i)) << ','
                  << format_double(nu[i]) << '\n';
        }
    }

    double max_mass_drift = 0.0;
    double max_clipped = 0.0;
    double max_linf_ratio = 0.0;
    double min_value = 0.0;
    std::unique_ptr<EntropyAuditor> auditor;
    if (driftless) {
        auditor = std::make_unique<EntropyAuditor>(nu, c.spec);
    }
    double max_audit = -std::numeric_limits<double>::infinity();

    const GridField final_field = run_chain(nu, T - t0, cfg, c.spec, c.drift,
        [&](const StepRecord& rec, const GridField& u) {
            max_mass_drift = std::max(max_mass_drift, std::abs(u.mass() - 1.0));
            max_clipped = std::max(max_clipped, rec.stats.clipped_mass);
            const double bound = std::exp(std::sqrt(K) * rec.t) * nu_linf;
            max_linf_ratio = std::max(max_linf_ratio, u.linf_norm() / bound);
            for (double v : u.values()) {
                min_value = std::min(min_value, v);
            }
            if (auditor) {
                max_audit = std::max(max_audit, auditor->add(rec, u).audit_value);
            }
            if (traj && (rec.index % stride == 0 || rec.index == steps)) {
                const double t = t0 + rec.t;
                for (std::size_t i = 0; i < u.n_cells(); ++i) {
                    *traj << rec.index << ',' << format_double(t) << ','
                          << format_double(u.center(i)) << ',' << format_double(u[i]) << '\n';
                }
            }
        });

    if (cfg.boundary == BoundaryPolicy::zero_flux) {
        c.rep.at_most("grid.mass_conservation", max_mass_drift, 1e-8);
    }
    c.rep.at_most("grid.clipped_mass", max_clipped, 1e-6);
    c.rep.at_least("grid.nonnegativity", min_value, 0.0);
    c.rep.at_most("grid.linf_bound_ratio", max_linf_ratio, 1.0, K > 0.0 ? 1e-3 : 1e-6);
    if (auditor) {
        c.rep.at_most("grid.entropy_audit", max_audit, 0.0, 1e-6);
    }
    return final_field;
}

void write_grid_profile(Context& c, const GridField& u, const BarenblattParams* bb, double T) {
    auto& prof = c.art.open("profile.csv");
    prof << (bb ? "x,u_h,u_exact\n" : "x,u_h\n");
    for (std::size_t i = 0; i < u.n_cells(); ++i) {
        if (bb) {
            csv_row(prof, {u.center(i), u[i], barenblatt_eval(*bb, T, u.center(i))});
        } else {
            csv_row(prof, {u.center(i), u[i]});
        }
    }
}

double grid_l1_error(const GridField& u, const BarenblattParams& bb, double T) {
    const GridField exact = GridField::sample(u.lo(), u.hi(), u.n_cells(),
                                              [&](double x) { return barenblatt_eval(bb, T, x); });
    return l1_distance(u, exact);
}

void run_fpe(Context& c) {
    const GridField u = run_grid(c, true);
    const double T = c.sc.real("T");
    if (has_closed_form(c.sc, c.spec, c.drift)) {
        const auto bb = make_barenblatt(1, c.sc.real("m"), c.sc.real("x0"));
        c.rep.at_most("grid.l1_error_vs_closed_form", grid_l1_error(u, bb, T), 0.02);
        write_grid_profile(c, u, &bb, T);
    } else {
        write_grid_profile(c, u, nullptr, T);
    }
}

// Particles -----------------------------------------------------------------------

SimConfig sim_config(const Scenario& sc, std::uint64_t seed) {
    SimConfig cfg;
    cfg.n_particles = static_cast<std::size_t>(sc.integer("n_particles"));
    cfg.dt = sc.real("dt");
    cfg.t0 = sc.real("t0");
    cfg.T = sc.real("T");
    cfg.kde = sc.text("kde") == "gaussian" ? KernelType::gaussian : KernelType::epanechnikov;
    if (sc.text("bandwidth") == "silverman") {
        cfg.bandwidth_rule = BandwidthRule::silverman;
    } else {
        cfg.bandwidth_rule = BandwidthRule::fixed;
        cfg.fixed_bandwidth = std::stod(sc.text("bandwidth"));
    }
    cfg.seed = seed;
    cfg.snapshot_times = sc.reals("snapshot_times");
    cfg.domain_bound = sc.real("domain_bound");
    cfg.histogram_bins = static_cast<std::size_t>(sc.integer("histogram_bins"));
    cfg.histogram_lo = sc.real("histogram_lo");
    cfg.histogram_hi = sc.real("histogram_hi");
    cfg.coupling_delta = sc.real("coupling_delta");
    cfg.validate();
    return cfg;
}

ParticleEnsemble initial_ensemble(const SimConfig& cfg, const BarenblattParams& bb) {
    const double R = bb.support_radius(cfg.t0);
    return seed_from_density([&](double x) { return barenblatt_eval(bb, cfg.t0, x); },
                             bb.x0 - R, bb.x0 + R, cfg.n_particles, cfg.seed, cfg.t0);
}

GridField barenblatt_reference(const BarenblattParams& bb, double t) {
    const double R = 1.01 * bb.support_radius(t);
    return GridField::sample(bb.x0 - R, bb.x0 + R, 8192,
                             [&](double x) { return barenblatt_eval(bb, t, x); })
        .normalized();
}

SimResult run_particles(Context& c, bool write_files, const ReferenceProfile& reference) {
    const SimConfig cfg = sim_config(c.sc, effective_seed(c.sc, c.opt));
    const auto bb = make_barenblatt(1, c.sc.real("m"), c.sc.real("x0"));
    ParticleEnsemble initial = initial_ensemble(cfg, bb);

    std::ostream* dump = nullptr;
    const auto stride = static_cast<std::uint64_t>(c.sc.integer("particle_dump_stride"));
    const auto count = std::min<std::size_t>(static_cast<std::size_t>(c.sc.integer("particle_dump_count")),
                                             cfg.n_particles);
    const std::size_t steps =
        static_cast<std::size_t>(std::ceil((cfg.T - cfg.t0) / cfg.dt * (1.0 - 1e-12)));
    if (write_files) {
        dump = &c.art.open("particles.csv");
        *dump << "step,t,particle,x\n";
    }
    SimResult res = run(cfg, c.spec, c.drift, std::move(initial), reference,
        [&](const ParticleEnsemble& e) {
            if (dump && (e.step % stride == 0 || e.step == steps)) {
                for (std::size_t i = 0; i < count; ++i) {
                    *dump << e.step << ',' << format_double(e.t) << ',' << i << ','
                          << format_double(e.positions[i]) << '\n';
                }
            }
        });

    const auto& fin = res.final_ensemble;
    c.rep.exactly("particles.count_conserved", static_cast<double>(fin.size()),
                  static_cast<double>(cfg.n_particles));
    const DensitySnapshot kde(fin.positions, fin.bandwidth, fin.kernel);
    c.rep.near("particles.kde_mass", 1.0, kde.mass(), 1e-8);
    CheckRecord clamp{"particles.clamp_events", "le", 0.0, static_cast<double>(res.clamped_evaluations),
                      0.0, res.clamped_evaluations == 0, true,
                      "clamp level " + format_double(res.clamp_level) + ", max ratio " +
                          format_double(res.max_clamp_ratio)};
    c.rep.add(clamp);

    if (write_files) {
        auto& traj = c.art.open("trajectory.csv");
        traj << "t,statistic,value\n";
        for (const auto& r : res.series) {
            traj << format_double(r.t) << ",mean," << format_double(r.mean) << '\n';
            traj << format_double(r.t) << ",variance," << format_double(r.variance) << '\n';
            traj << format_double(r.t) << ",bandwidth," << format_double(r.bandwidth) << '\n';
        }
    }
    return res;
}

void check_particles_vs_closed_form(Context& c, const SimResult& res) {
    const auto bb = make_barenblatt(1, c.sc.real("m"), c.sc.real("x0"));
    const double T = c.sc.real("T");
    const auto& fin = res.final_ensemble;
    const double target = barenblatt_moment2(bb, T);
    c.rep.near("particles.variance_vs_closed_form", target, fin.variance(), 0.05 * target);
    c.rep.near("particles.variance_loglog_slope", 2.0 * bb.beta_ss, variance_loglog_slope(res.series),
               0.05);
    c.rep.near("particles.mean_vs_x0", bb.x0, fin.mean(),
               4.0 * std::sqrt(fin.variance() / static_cast<double>(fin.size())));
    c.rep.at_most("particles.w1_vs_closed_form", w1_distance(fin.positions, barenblatt_reference(bb, T)),
                  0.05);
}

void run_particle(Context& c) {
    const bool closed = has_closed_form(c.sc, c.spec, c.drift);
    const auto bb = make_barenblatt(1, c.sc.real("m"), c.sc.real("x0"));
    ReferenceProfile reference;
    if (closed) {
        reference = [bb](double t) { return barenblatt_reference(bb, t); };
    }
    const SimResult res = run_particles(c, true, reference);
    if (closed) {
        check_particles_vs_closed_form(c, res);
    }
    for (const auto& snap : res.snapshots) {
        if (snap.w1_to_reference) {
            c.rep.add_row("snapshot", {{"t", snap.t}, {"mean", snap.mean}, {"variance", snap.variance},
                                       {"w1_to_reference", *snap.w1_to_reference}});
        } else {
            c.rep.add_row("snapshot", {{"t", snap.t}, {"mean", snap.mean}, {"variance", snap.variance}});
        }
    }

    const auto& hist = res.snapshots.back().histogram;
    auto& prof = c.art.open("profile.csv");
    prof << (closed ? "x,histogram,u_exact\n" : "x,histogram\n");
    const double width = (hist.hi - hist.lo) / static_cast<double>(hist.density.size());
    for (std::size_t i = 0; i < hist.density.size(); ++i) {
        const double x = hist.lo + (static_cast<double>(i) + 0.5) * width;
        if (closed) {
            csv_row(prof, {x, hist.density[i], barenblatt_eval(bb, c.sc.real("T"), x)});
        } else {
            csv_row(prof, {x, hist.density[i]});
        }
    }
}

void run_compare(Context& c) {
    const double T = c.sc.real("T");
    const GridField u = run_grid(c, false);
    const SimResult res = run_particles(c, false, {});
    const auto& fin = res.final_ensemble;
    c.rep.at_most("compare.w1_particles_vs_grid", w1_distance(fin.positions, u), 0.05);

    const bool closed = has_closed_form(c.sc, c.spec, c.drift);
    const auto bb = make_barenblatt(1, c.sc.real("m"), c.sc.real("x0"));
    if (closed) {
        c.rep.at_most("compare.l1_grid_vs_closed_form", grid_l1_error(u, bb, T), 0.02);
        c.rep.at_most("compare.w1_particles_vs_closed_form",
                      w1_distance(fin.positions, barenblatt_reference(bb, T)), 0.05);
        c.rep.at_most("compare.w1_grid_vs_closed_form", w1_distance(u, barenblatt_reference(bb, T)),
                      0.05);
    }

    auto& prof = c.art.open("profile.csv");
    prof << "source,x,value\n";
    for (std::size_t i = 0; i < u.n_cells(); ++i) {
        prof << "grid," << format_double(u.center(i)) << ',' << format_double(u[i]) << '\n';
    }
    if (closed) {
        for (std::size_t i = 0; i < u.n_cells(); ++i) {
            prof << "closed_form," << format_double(u.center(i)) << ','
                 << format_double(barenblatt_eval(bb, T, u.center(i))) << '\n';
        }
    }
    const Histogram hist = make_histogram(fin.positions, u.lo(), u.hi(), c.sc.integer("histogram_bins"));
    const double width = (hist.hi - hist.lo) / static_cast<double>(hist.density.size());
    for (std::size_t i = 0; i < hist.density.size(); ++i) {
        prof << "particles," << format_double(hist.lo + (static_cast<double>(i) + 0.5) * width) << ','
             << format_double(hist.density[i]) << '\n';
    }
}

// regularity-scan -------------------------------------------------------------------

void run_regularity_scan(Context& c) {
    const double m = c.sc.real("m");
    const double p_exp = c.sc.real("p_exp");
    const double norm_p = c.sc.real("norm_p");
    const double t = c.sc.real("scan_t");
    const auto bb = make_barenblatt(1, m, c.sc.real("x0"));
    const auto thr = regularity_threshold(m, p_exp);
    const double R = bb.support_radius(t);
    const auto n = static_cast<std::size_t>(c.sc.integer("scan_cells"));
    const auto F = SampledFunction::sample(bb.x0 - R, bb.x0 + R, n, [&](double x) {
        return std::pow(barenblatt_eval(bb, t, x), p_exp);
    });

    c.rep.add_row("threshold", {{"s_max", thr.s_max},
                                {"density_condition", thr.density_condition ? 1.0 : 0.0}});
    auto& prof = c.art.open("profile.csv");
    prof << "s,value,coarse_value,converged,divergent_trend,integrability_exponent,integrable\n";
    for (double s : c.sc.reals("s_values")) {
        const auto est = gagliardo_seminorm(F, s, norm_p);
        const auto ti = time_integrability_exponent(bb, p_exp, s);
        const std::string tag = format_double(s);
        const double rel = std::abs(est.value - est.coarse_value) /
                           std::max({est.value, est.coarse_value, 1e-300});
        if (s < thr.s_max) {
            c.rep.at_most("gagliardo.refinement_stable.s=" + tag, rel, 0.05);
        } else {
            CheckRecord r{"gagliardo.divergent_trend.s=" + tag, "ge", 2.0,
                          est.coarse_value > 0.0 ? est.value / est.coarse_value : 0.0, 0.0,
                          est.divergent_trend, true, "beyond s_max; finite grids may not show growth"};
            c.rep.add(r);
        }
        c.rep.exactly("time_integrability.flip.s=" + tag, ti.integrable ? 1.0 : 0.0,
                      s < thr.s_max ? 1.0 : 0.0);
        csv_row(prof, {s, est.value, est.coarse_value, est.converged ? 1.0 : 0.0,
                       est.divergent_trend ? 1.0 : 0.0, ti.exponent, ti.integrable ? 1.0 : 0.0});
    }
}

// coupling ----------------------------------------------------------------------------

void run_coupling(Context& c) {
    const SimConfig cfg = sim_config(c.sc, effective_seed(c.sc, c.opt));
    const auto bb = make_barenblatt(1, c.sc.real("m"), c.sc.real("x0"));
    const double perturbation = c.sc.real("perturbation");
    const auto records = coupling_experiment(cfg, c.spec, c.drift, initial_ensemble(cfg, bb), perturbation);

    auto& traj = c.art.open("trajectory.csv");
    traj << "t,sup_distance,f_delta_mean\n";
    auto& nd = c.art.open("coupling.ndjson");
    double max_sup = 0.0;
    double max_f = 0.0;
    for (const auto& r : records) {
        csv_row(traj, {r.t, r.sup_distance, r.f_delta_mean});
        nd << "{\"t\":" << format_double(r.t) << ",\"sup_distance\":" << format_double(r.sup_distance)
           << ",\"f_delta_mean\":" << format_double(r.f_delta_mean) << "}\n";
        max_sup = std::max(max_sup, r.sup_distance);
        max_f = std::max(max_f, r.f_delta_mean);
    }
    if (perturbation == 0.0) {
        c.rep.exactly("coupling.zero_separation", max_sup, 0.0);
        c.rep.exactly("coupling.zero_f_delta", max_f, 0.0);
    } else {
        c.rep.at_most("coupling.terminal_separation", records.back().sup_distance,
                      c.sc.real("coupling_bound"));
    }
}

// hypotheses-check ----------------------------------------------------------------------

void run_hypotheses(Context& c) {
    const auto report = check_hypotheses(c.spec, c.drift);
    for (const auto& clause : report.clauses) {
        CheckRecord r{clause.id, "eq", 1.0, clause.passed ? 1.0 : 0.0, 0.0, clause.passed,
                      clause.advisory, clause.witness};
        c.rep.add(r);
    }
    const double l0 = lambda_zero(c.drift);
    c.rep.add_row("lambda_zero", {{"value", std::isfinite(l0) ? l0 : -1.0}});
}

}  // namespace

NonlinearitySpec make_nonlinearity(const Scenario& sc) {
    const auto& samples = sc.reals("beta_samples");
    if (!samples.empty()) {
        return NonlinearitySpec::custom(samples, sc.real("beta_r_max"), sc.real("m"), sc.real("zeta"));
    }
    return NonlinearitySpec::power_law(sc.real("m"), sc.real("zeta"));
}

DriftSpec make_drift(const Scenario& sc) {
    DriftSpec drift;
    const auto& e = sc.text("drift_E");
    if (e == "tanh") {
        drift.E = VectorField::tanh_profile(sc.real("E_strength"));
    } else if (e == "dipole") {
        drift.E = VectorField::gaussian_dipole(sc.real("E_strength"), sc.real("E_width"));
    }
    const auto& b = sc.text("drift_b");
    if (b == "constant") {
        drift.b = ScalarResponse::constant(sc.real("b_value"));
    } else if (b == "monomial") {
        drift.b = ScalarResponse::monomial(sc.real("b_exponent"), sc.real("b_saturation"));
    } else if (b == "clipped-identity") {
        drift.b = ScalarResponse::clipped_identity();
    }
    return drift;
}

RunOutcome run_scenario(const Scenario& sc, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::pair<std::string, std::string>> echo;
    for (const auto& [key, value] : sc.params) {
        echo.emplace_back(key, key == "seed" && options.seed_override
                                   ? std::to_string(*options.seed_override)
                                   : sc.render(key));
    }
    DiagnosticsReport rep(sc.name, std::move(echo));

    RunOutcome outcome;
    std::error_code ec;
    fs::create_directories(options.output_dir, ec);
    if (ec) {
        outcome.error = "cannot create output directory " + options.output_dir.string() + ": " +
                        ec.message();
        return outcome;
    }
    Artifacts art(options.output_dir);

    auto finish = [&](bool finished) {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        auto& out = art.open("report.ndjson");
        rep.write(out, wall);
        outcome.artifacts = art.close(finished);
    };

    try {
        Context c{sc, options, rep, art, make_nonlinearity(sc), make_drift(sc)};
        if (sc.name == "barenblatt-verify") {
            run_barenblatt_verify(c);
        } else if (sc.name == "fpe-run") {
            run_fpe(c);
        } else if (sc.name == "particle-run") {
            run_particle(c);
        } else if (sc.name == "compare") {
            run_compare(c);
        } else if (sc.name == "regularity-scan") {
            run_regularity_scan(c);
        } else if (sc.name == "coupling") {
            run_coupling(c);
        } else if (sc.name == "hypotheses-check") {
            run_hypotheses(c);
        } else {
            throw ConfigError("unknown scenario '" + sc.name + "'");
        }
    } catch (const std::exception& e) {
        outcome.error = e.what();
        rep.set_error(e.what());
        try {
            finish(false);
        } catch (const std::exception&) {
            // The original error is the one worth reporting.
        }
        outcome.exit_code = kExitError;
        return outcome;
    }
    finish(true);
    outcome.exit_code = rep.all_passed() ? kExitOk : kExitCheckFailed;
    return outcome;
}

}  // namespace nemytskii
