// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include "nemytskii/analysis.hpp"
#include "nemytskii/closed_form.hpp"
#include "nemytskii/fpe_solver.hpp"
#include "nemytskii/particle_sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace nemytskii;

namespace {

const NonlinearitySpec pme2 = NonlinearitySpec::power_law(2.0);
const DriftSpec driftless{VectorField::zero(), ScalarResponse::zero()};

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

/// Mass / positivity ledger shared by every solver and particle run.
struct Conservation {
    double max_mass_drift = 0.0;
    double max_clipped = 0.0;
    double min_value = 0.0;
    std::size_t fields = 0;

    void observe(const StepRecord& rec, const GridField& u, double mass0) {
        max_mass_drift = std::max(max_mass_drift, std::abs(u.mass() - mass0));
        max_clipped = std::max(max_clipped, rec.stats.clipped_mass);
        for (double v : u.values()) {
            min_value = std::min(min_value, v);
        }
        ++fields;
    }
};

Conservation conservation;
double particle_kde_mass_drift = 0.0;
double particle_kde_min = 0.0;
bool particle_count_kept = true;

GridField barenblatt_grid(const BarenblattParams& bb, double t, std::size_t cells) {
    return GridField::sample(-6.0, 6.0, cells, [&](double x) { return barenblatt_eval(bb, t, x); });
}

GridField random_smooth(std::mt19937_64& gen, std::size_t cells) {
    std::uniform_real_distribution<double> mu(-2.0, 2.0);
    std::uniform_real_distribution<double> sd(0.2, 0.8);
    std::uniform_real_distribution<double> w(0.2, 1.0);
    std::uniform_int_distribution<int> count(1, 4);
    struct Bump {
        double mu, sd, w;
    };
    std::vector<Bump> bumps(count(gen));
    for (auto& b : bumps) {
        b = {mu(gen), sd(gen), w(gen)};
    }
    return GridField::sample(-5.0, 5.0, cells, [&](double x) {
               double s = 0.0;
               for (const auto& b : bumps) {
                   s += b.w * std::exp(-0.5 * (x - b.mu) * (x - b.mu) / (b.sd * b.sd));
               }
               return s;
           })
        .normalized();
}

SolverConfig solver(double h) {
    SolverConfig c;
    c.lambda_step = h;
    return c;
}

double barenblatt_chain_error(const BarenblattParams& bb, std::size_t cells, double h) {
    const auto nu = barenblatt_grid(bb, 0.1, cells).normalized();
    const auto u = run_chain(nu, 0.9, solver(h), pme2, driftless,
                             [&](const StepRecord& rec, const GridField& f) { conservation.observe(rec, f, 1.0); });
    return l1_distance(u, barenblatt_grid(bb, 1.0, cells));
}

void criterion1(Outcome& o) {
    const auto bb = make_barenblatt(1, 2.0);
    o.require(std::abs(bb.alpha - 1.0 / 3.0) <= 1e-15, "alpha");
    o.require(std::abs(bb.k - 1.0 / 12.0) <= 1e-15, "k");
    o.require(std::abs(bb.beta_ss - 1.0 / 3.0) <= 1e-15, "beta_ss");
    o.require(std::abs(bb.c_norm - std::cbrt(3.0) / 4.0) <= 1e-9, "c_norm");
    double worst = 0.0;
    for (double t : {0.1, 1.0, 10.0}) {
        worst = std::max(worst, std::abs(barenblatt_mass(bb, t) - 1.0));
    }
    o.require(worst <= 1e-9, "mass");
    o.detail << "c_norm err=" << std::abs(bb.c_norm - std::cbrt(3.0) / 4.0) << " mass err=" << worst;
}

void criterion2(Outcome& o) {
    const auto bb = make_barenblatt(1, 2.0);
    const double e0 = barenblatt_chain_error(bb, 4000, 1e-3);
    const double e1 = barenblatt_chain_error(bb, 8000, 5e-4);
    const double order = std::log2(e0 / e1);
    o.require(e0 <= 0.02, "L1 error <= 0.02");
    o.require(e1 < e0, "error decreases under refinement");
    o.require(order >= 0.5, "observed order >= 0.5");
    o.detail << "L1 error=" << e0 << " refined=" << e1 << " order=" << order;
}

void criterion3(Outcome& o) {
    std::mt19937_64 gen(2024);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const auto a = random_smooth(gen, 400);
        const auto b = random_smooth(gen, 400);
        const double d0 = l1_distance(a, b);
        const auto ta = step_chain(a, 0.5, solver(5e-3), pme2, driftless);
        const auto tb = step_chain(b, 0.5, solver(5e-3), pme2, driftless);
        for (std::size_t i = 0; i < ta.fields.size(); ++i) {
            conservation.observe(ta.steps[i], ta.fields[i], 1.0);
            conservation.observe(tb.steps[i], tb.fields[i], 1.0);
            worst = std::max(worst, l1_distance(ta.fields[i], tb.fields[i]) / d0);
        }
    }
    o.require(worst <= 1.0 + 1e-6, "contraction ratio <= 1 + 1e-6");
    o.detail << "50 pairs, max ratio=" << worst;
}

void criterion4(Outcome& o) {
    // E = -tanh(x): (div E)⁻ + |E| = sech² + |tanh| peaks at 5/4.
    const DriftSpec drift{VectorField::tanh_profile(-1.0), ScalarResponse::constant(1.0)};
    const double K = drift.drift_bound();
    o.require(std::abs(K - 1.25) <= 1e-12, "analytic drift bound 5/4");
    const auto nu = GridField::sample(-6.0, 6.0, 1200, [](double x) { return std::exp(-0.5 * x * x); }).normalized();
    double worst_drift = 0.0;
    run_chain(nu, 1.0, solver(1e-3), pme2, drift, [&](const StepRecord& rec, const GridField& u) {
        conservation.observe(rec, u, 1.0);
        worst_drift = std::max(worst_drift, u.linf_norm() / (std::exp(std::sqrt(K) * rec.t) * nu.linf_norm()));
    });
    o.require(worst_drift <= 1.001, "drift bound");

    std::mt19937_64 gen(4);
    const auto nu0 = random_smooth(gen, 1000);
    double worst_free = 0.0;
    run_chain(nu0, 1.0, solver(1e-3), pme2, driftless, [&](const StepRecord& rec, const GridField& u) {
        conservation.observe(rec, u, 1.0);
        worst_free = std::max(worst_free, u.linf_norm() / nu0.linf_norm());
    });
    o.require(worst_free <= 1.0 + 1e-6, "driftless bound");
    o.detail << "max ratio with drift=" << worst_drift << " without=" << worst_free;
}

void criterion6(Outcome& o) {
    std::mt19937_64 gen(6);
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 10; ++k) {
        const auto nu = random_smooth(gen, 800);
        EntropyAuditor audit(nu, pme2);
        run_chain(nu, 0.5, solver(1e-3), pme2, driftless, [&](const StepRecord& rec, const GridField& u) {
            conservation.observe(rec, u, 1.0);
            worst = std::max(worst, audit.add(rec, u).audit_value);
        });
    }
    o.require(worst <= 1e-6, "audit <= 1e-6");
    o.detail << "10 runs, max audit=" << worst;
}

void criterion7(Outcome& o) {
    const auto bb = make_barenblatt(1, 2.0);
    SimConfig cfg;
    cfg.n_particles = 100000;
    cfg.dt = 1e-3;
    cfg.t0 = 0.1;
    cfg.T = 1.0;
    cfg.seed = 42;
    auto initial = seed_from_density([&](double x) { return barenblatt_eval(bb, 0.1, x); }, -6.0, 6.0,
                                     cfg.n_particles, cfg.seed, cfg.t0);
    const auto observer = [&](const ParticleEnsemble& e) {
        particle_count_kept = particle_count_kept && e.size() == cfg.n_particles;
        if (e.step % 100 == 0) {
            const DensitySnapshot snap(e.positions, e.bandwidth > 0 ? e.bandwidth : silverman_bandwidth(e.positions),
                                       e.kernel);
            particle_kde_mass_drift = std::max(particle_kde_mass_drift, std::abs(snap.mass() - 1.0));
            for (double x = -4.0; x <= 4.0; x += 0.01) {
                particle_kde_min = std::min(particle_kde_min, snap(x));
            }
        }
    };
    const auto res = run(cfg, pme2, driftless, std::move(initial), {}, observer);
    const double target = std::pow(3.0, 4.0 / 3.0) / 5.0;
    const double var = res.final_ensemble.variance();
    const double slope = variance_loglog_slope(res.series);
    const double w1 = w1_distance(res.final_ensemble.positions, barenblatt_grid(bb, 1.0, 4000).normalized());
    o.require(std::abs(var - target) <= 0.05 * target, "variance within 5%");
    o.require(w1 <= 0.05, "W1 <= 0.05");
    o.require(std::abs(slope - 2.0 / 3.0) <= 0.05, "slope 2/3 +- 0.05");
    o.detail << "variance=" << var << " (target " << target << ") W1=" << w1 << " slope=" << slope;
}

void criterion5(Outcome& o) {
    o.require(conservation.fields > 0, "solver fields observed");
    o.require(conservation.max_mass_drift <= 1e-8, "solver mass");
    o.require(conservation.max_clipped <= 1e-6, "clipped mass");
    o.require(conservation.min_value >= 0.0, "solver nonnegativity");
    o.require(particle_count_kept, "particle count");
    o.require(particle_kde_mass_drift <= 1e-8, "KDE mass");
    o.require(particle_kde_min >= 0.0, "KDE nonnegativity");
    o.detail << conservation.fields << " fields, max mass drift=" << conservation.max_mass_drift
             << " max clipped=" << conservation.max_clipped << " KDE mass drift=" << particle_kde_mass_drift;
}

void criterion8(Outcome& o) {
    const auto bb = make_barenblatt(1, 2.0);
    SimConfig cfg;
    cfg.n_particles = 10000;
    cfg.dt = 1e-3;
    cfg.t0 = 0.1;
    cfg.T = 1.0;
    cfg.seed = 42;
    const auto initial = seed_from_density([&](double x) { return barenblatt_eval(bb, 0.1, x); }, -6.0, 6.0,
                                           cfg.n_particles, cfg.seed, cfg.t0);
    const auto zero = coupling_experiment(cfg, pme2, driftless, initial, 0.0);
    bool exact = true;
    for (const auto& r : zero) {
        exact = exact && r.sup_distance == 0.0 && r.f_delta_mean == 0.0;
    }
    const auto tiny = coupling_experiment(cfg, pme2, driftless, initial, 1e-8);
    const double terminal = tiny.back().sup_distance;
    o.require(exact, "zero perturbation gives zero separation");
    o.require(terminal <= 1e-2, "terminal separation <= 1e-2");
    o.detail << "zero-case exact=" << (exact ? "yes" : "no") << " terminal separation=" << terminal;
}

void criterion9(Outcome& o) {
    const auto bb = make_barenblatt(1, 2.0);
    const double p_exp = 1.0;
    const double s_max = regularity_threshold(2.0, p_exp).s_max;
    const auto f = SampledFunction::sample(-3.0, 3.0, 4000, [&](double x) { return barenblatt_eval(bb, 1.0, x); });
    std::size_t stable = 0, total = 0;
    for (double s : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95}) {
        if (s >= s_max) {
            continue;
        }
        ++total;
        stable += gagliardo_seminorm(f, s, 2.0).converged ? 1 : 0;
    }
    o.require(stable == total, "refinement-stable for s < s_max");

    std::size_t checked = 0, flips = 0;
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double m = 1.25 + 0.75 * i;
        const auto q = make_barenblatt(1, m);
        for (int j = 1; j <= 4; ++j) {
            const double p = m * j / 4.0;
            const double sm = regularity_threshold(m, p).s_max;
            for (double frac : {0.5, 0.9, 1.0, 1.1, 1.5}) {
                const double s = frac * sm;
                const auto ti = time_integrability_exponent(q, p, s);
                const double analytic = -1.0 + (2.0 - s * m / p) / ((m - 1.0) + 2.0);
                worst = std::max(worst, std::abs(ti.exponent - analytic));
                flips += ti.integrable == (s < sm) ? 1 : 0;
                ++checked;
            }
        }
    }
    o.require(checked == 100 && flips == 100, "integrability flips at s = 2p/m");
    o.require(worst <= 1e-12, "exponent formula to 1e-12");
    o.detail << stable << "/" << total << " stable, " << flips << "/" << checked
             << " flips, max exponent err=" << worst;
}

void criterion10(Outcome& o) {
    const double inf = std::numeric_limits<double>::infinity();
    const auto one = SampledFunction::sample(-1.0, 3.0, 400, [](double) { return 1.0; });
    const auto ind = SampledFunction::sample(-1.0, 3.0, 400, [](double x) { return x >= 0.0 && x <= 1.0 ? 1.0 : 0.0; });
    const double c_err = std::abs(maximal_function(one, inf, 1.3) - 1.0);
    const double i_err = std::abs(maximal_function(ind, inf, 2.0) - 0.25);
    o.require(c_err <= 1e-6, "constant case");
    o.require(i_err <= 1e-6, "indicator case");

    std::mt19937_64 gen(10);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::uniform_int_distribution<int> knots(2, 12);
    std::size_t violations = 0, pairs_total = 0;
    double worst = 0.0;
    const std::size_t n = 2000;
    const double lo = -2.0, hi = 2.0, dx = (hi - lo) / n;
    for (int k = 0; k < 100; ++k) {
        // Piecewise-linear on random breakpoints; derivative sampled at cell midpoints.
        const int nk = knots(gen);
        std::vector<double> xs{lo}, ys{U(gen)};
        for (int i = 1; i < nk; ++i) {
            xs.push_back(lo + (hi - lo) * i / nk + 0.3 * (hi - lo) / nk * U(gen));
            ys.push_back(U(gen));
        }
        xs.push_back(hi);
        ys.push_back(U(gen));
        std::vector<double> v(n), dv(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = lo + (i + 0.5) * dx;
            const auto it = std::upper_bound(xs.begin(), xs.end(), x);
            const std::size_t seg = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - xs.begin(), 1), xs.size() - 1);
            const double slope = (ys[seg] - ys[seg - 1]) / (xs[seg] - xs[seg - 1]);
            v[i] = ys[seg - 1] + slope * (x - xs[seg - 1]);
            dv[i] = slope;
        }
        const SampledFunction f(lo + 0.5 * dx, dx, v, dv);
        std::vector<std::pair<double, double>> pairs;
        std::uniform_real_distribution<double> X(lo + 0.01, hi - 0.01);
        while (pairs.size() < 100) {
            const double x = X(gen), y = X(gen);
            if (std::abs(x - y) > 4 * dx) {
                pairs.emplace_back(x, y);
            }
        }
        const auto rep = lipschitz_estimate_check(f, pairs, hi - lo, 2.0);
        violations += rep.violations;
        pairs_total += rep.pairs_checked;
        worst = std::max(worst, rep.max_ratio);
    }
    o.require(pairs_total == 10000, "100 x 100 pairs");
    o.require(violations == 0, "zero violations");
    o.detail << "indicator err=" << i_err << " pairs=" << pairs_total << " violations=" << violations
             << " max ratio=" << worst;
}

struct Criterion {
    int id;
    const char* name;
    double time_limit;  // seconds; 0 = none
    std::function<void(Outcome&)> body;
};

}  // namespace

int main() {
    // Criterion 5 aggregates the runs of the others, so it is evaluated last.
    const std::vector<Criterion> criteria{
        {1, "barenblatt exactness", 1.0, criterion1},
        {2, "scheme accuracy", 300.0, criterion2},
        {3, "L1 contraction", 600.0, criterion3},
        {4, "Linf bound", 0.0, criterion4},
        {6, "entropy audit", 0.0, criterion6},
        {7, "PDE-SDE marginals", 600.0, criterion7},
        {8, "coupling determinism", 0.0, criterion8},
        {9, "regularity dichotomy", 0.0, criterion9},
        {10, "maximal function suite", 0.0, criterion10},
        {5, "nonnegativity and mass", 0.0, criterion5},
    };
    bool all = true;
    for (const auto& c : criteria) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.body(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit > 0 && secs > c.time_limit) {
            o.require(false, "runtime limit");
        }
        all = all && o.pass;
        char head[128];
        std::snprintf(head, sizeof head, "%s criterion %d (%s) %.2fs: ", o.pass ? "PASS" : "FAIL", c.id, c.name, secs);
        std::printf("%s%s\n", head, o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("acceptance: %s\n", all ? "all criteria passed" : "some criteria failed");
    return all ? 0 : 1;
}
