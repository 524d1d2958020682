#include "nemytskii/analysis.hpp"
#include "nemytskii/closed_form.hpp"
#include "nemytskii/error.hpp"
#include "nemytskii/particle_sim.hpp"
#include "nemytskii/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace nemytskii;

namespace {

const NonlinearitySpec pme2 = NonlinearitySpec::power_law(2.0);
const DriftSpec none{VectorField::zero(), ScalarResponse::zero()};

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

SimConfig small_config(std::size_t n, double T) {
    SimConfig c;
    c.n_particles = n;
    c.dt = 1e-2;
    c.t0 = 0.1;
    c.T = T;
    c.seed = 3;
    return c;
}

ParticleEnsemble barenblatt_ensemble(std::size_t n, std::uint64_t seed) {
    const auto bb = make_barenblatt(1, 2.0);
    return seed_from_density([&](double x) { return barenblatt_eval(bb, 0.1, x); }, -3.0, 3.0, n,
                             seed, 0.1);
}

}  // namespace

// Known-answer vectors from the Random123 distribution.
TEST(Philox, KnownAnswerVectors) {
    EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}),
              (PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
    EXPECT_EQ(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                            {0xffffffffu, 0xffffffffu}),
              (PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
    EXPECT_EQ(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                            {0xa4093822u, 0x299f31d0u}),
              (PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, OpenUnitInterval) {
    EXPECT_GT(CounterRng::to_open_unit(0, 0), 0.0);
    EXPECT_LT(CounterRng::to_open_unit(0xffffffffu, 0xffffffffu), 1.0);
}

TEST(Philox, NormalMoments) {
    const CounterRng rng(11);
    const std::size_t n = 200000;
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = rng.normal(i, 5);
        s += z;
        s2 += z * z;
    }
    EXPECT_NEAR(s / n, 0.0, 4.0 / std::sqrt(double(n)));
    EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Seeding, MatchesGaussianMomentsAndCdf) {
    const std::size_t n = 100000;
    const auto ens = seed_from_density(std_normal_pdf, -8.0, 8.0, n, 42);
    EXPECT_EQ(ens.size(), n);
    EXPECT_NEAR(ens.mean(), 0.0, 4.0 / std::sqrt(double(n)));
    EXPECT_NEAR(ens.variance(), 1.0, 0.02);
    auto x = ens.positions;
    std::sort(x.begin(), x.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double F = std_normal_cdf(x[i]);
        ks = std::max({ks, std::abs(F - double(i) / n), std::abs(F - double(i + 1) / n)});
    }
    // 1% critical value of the Kolmogorov-Smirnov statistic.
    EXPECT_LT(ks, 1.63 / std::sqrt(double(n)));
}

TEST(Seeding, DeterministicAndRejectsBadMass) {
    const auto a = seed_from_density(std_normal_pdf, -8.0, 8.0, 1000, 1);
    const auto b = seed_from_density(std_normal_pdf, -8.0, 8.0, 1000, 1);
    const auto c = seed_from_density(std_normal_pdf, -8.0, 8.0, 1000, 2);
    EXPECT_EQ(a.positions, b.positions);
    EXPECT_NE(a.positions, c.positions);
    EXPECT_THROW(seed_from_density([](double x) { return 2.0 * std_normal_pdf(x); }, -8.0, 8.0, 100, 1),
                 InputError);
}

TEST(Kde, KernelsIntegrateToOne) {
    for (auto k : {KernelType::gaussian, KernelType::epanechnikov}) {
        double s = 0.0;
        const double dz = 1e-3;
        for (double z = -3.0; z <= 3.0; z += dz) {
            s += kernel_value(k, z, 0.3) * dz;
        }
        EXPECT_NEAR(s, 1.0, 1e-3);
    }
    EXPECT_EQ(kernel_value(KernelType::epanechnikov, 1.0, 0.5), 0.0);
    EXPECT_DOUBLE_EQ(kernel_value(KernelType::epanechnikov, 0.0, 1.0), 0.75);
}

TEST(Kde, DirectAndBinnedAgree) {
    auto ens = seed_from_density(std_normal_pdf, -8.0, 8.0, 20000, 5);
    ens.bandwidth = silverman_bandwidth(ens.positions);
    EXPECT_NEAR(ens.bandwidth, 1.06 * std::pow(20000.0, -0.2), 0.01);
    for (auto k : {KernelType::gaussian, KernelType::epanechnikov}) {
        ens.kernel = k;
        const DensitySnapshot snap(ens.positions, ens.bandwidth, k);
        EXPECT_NEAR(snap.mass(), 1.0, 1e-12);
        for (double x : {-2.0, -0.5, 0.0, 0.7, 1.9}) {
            EXPECT_NEAR(snap(x), kde_density(ens, x), 5e-3) << "x = " << x;
            EXPECT_NEAR(snap(x), std_normal_pdf(x), 0.03) << "x = " << x;
        }
        EXPECT_EQ(snap(100.0), 0.0);
    }
}

TEST(Increment, StandardDeviationAndDegeneracy) {
    // β(r) = r² ⇒ σ²(u) = 2u.
    const double dt = 1e-3;
    EXPECT_DOUBLE_EQ(particle_increment(0.0, 0.5, dt, 1.0, pme2, none), std::sqrt(dt));
    EXPECT_EQ(particle_increment(0.0, 0.0, dt, 1.0, pme2, none), 0.0);
    const CounterRng rng(2);
    double s2 = 0.0;
    const std::size_t n = 100000;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = particle_increment(0.0, 0.5, dt, rng.normal(i, 0), pme2, none);
        s2 += dx * dx;
    }
    EXPECT_NEAR(std::sqrt(s2 / n), std::sqrt(dt), 0.01 * std::sqrt(dt));
}

TEST(Increment, DriftTerm) {
    const DriftSpec d{VectorField::tanh_profile(1.0), ScalarResponse::constant(2.0)};
    const double dx = particle_increment(0.5, 0.0, 0.1, 0.0, pme2, d);
    EXPECT_NEAR(dx, 0.1 * 2.0 * d.E.value(0.5), 1e-15);
}

TEST(Run, DeterministicForFixedSeed) {
    const auto cfg = small_config(2000, 0.3);
    const auto a = run(cfg, pme2, none, barenblatt_ensemble(2000, 3));
    const auto b = run(cfg, pme2, none, barenblatt_ensemble(2000, 3));
    EXPECT_EQ(a.final_ensemble.positions, b.final_ensemble.positions);
    EXPECT_NEAR(a.final_ensemble.t, 0.3, 1e-12);
    EXPECT_EQ(a.series.size(), 21u);
    EXPECT_EQ(a.series.front().step, 0u);
}

TEST(Run, RemainderStepLandsOnT) {
    auto cfg = small_config(1000, 0.125);
    const auto r = run(cfg, pme2, none, barenblatt_ensemble(1000, 3));
    EXPECT_NEAR(r.final_ensemble.t, 0.125, 1e-12);
    EXPECT_EQ(r.final_ensemble.step, 3u);
}

TEST(Run, W1ShrinksWithEnsembleSize) {
    const auto bb = make_barenblatt(1, 2.0);
    const auto exact =
        GridField::sample(-4.0, 4.0, 4000, [&](double x) { return barenblatt_eval(bb, 0.4, x); }).normalized();
    std::vector<double> w;
    for (std::size_t n : {1000u, 10000u, 100000u}) {
        const auto r = run(small_config(n, 0.4), pme2, none, barenblatt_ensemble(n, 9));
        w.push_back(w1_distance(r.final_ensemble.positions, exact));
    }
    EXPECT_GT(w[0], w[1]);
    EXPECT_GT(w[1], w[2]);
}

TEST(Run, WatchdogStopsRunaways) {
    auto cfg = small_config(1000, 0.3);
    cfg.domain_bound = 0.01;
    EXPECT_THROW(run(cfg, pme2, none, barenblatt_ensemble(1000, 3)), SimulationError);
}

TEST(Coupling, ZeroPerturbationStaysCoupled) {
    const auto cfg = small_config(2000, 0.3);
    const auto recs = coupling_experiment(cfg, pme2, none, barenblatt_ensemble(2000, 3), 0.0);
    ASSERT_FALSE(recs.empty());
    for (const auto& r : recs) {
        EXPECT_EQ(r.sup_distance, 0.0);
        EXPECT_EQ(r.f_delta_mean, 0.0);
    }
}

TEST(Coupling, SmallPerturbationStaysSmall) {
    const auto cfg = small_config(2000, 0.3);
    const auto recs = coupling_experiment(cfg, pme2, none, barenblatt_ensemble(2000, 3), 1e-8);
    EXPECT_NEAR(recs.front().sup_distance, 1e-8, 1e-12);
    EXPECT_LT(recs.back().sup_distance, 1e-6);
}

TEST(Config, ValidateRejectsBadValues) {
    SimConfig c;
    c.n_particles = 10;
    EXPECT_THROW(c.validate(), ConfigError);
    c = SimConfig{};
    c.t0 = 2.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = SimConfig{};
    c.bandwidth_rule = BandwidthRule::fixed;
    EXPECT_THROW(c.validate(), ConfigError);
    EXPECT_NO_THROW(SimConfig{}.validate());
}

TEST(Statistics, LogLogSlopeOfPowerLaw) {
    std::vector<StatRecord> s;
    for (int i = 0; i < 10; ++i) {
        const double t = 0.1 * (i + 1);
        s.push_back({std::size_t(i), t, 0.0, 3.0 * std::pow(t, 2.0 / 3.0), 0.0});
    }
    EXPECT_NEAR(variance_loglog_slope(s), 2.0 / 3.0, 1e-12);
}

TEST(Statistics, HistogramIsADensity) {
    const auto ens = seed_from_density(std_normal_pdf, -8.0, 8.0, 10000, 4);
    const auto h = make_histogram(ens.positions, -8.0, 8.0, 64);
    double mass = 0.0;
    for (double v : h.density) {
        mass += v * 16.0 / 64.0;
    }
    EXPECT_NEAR(mass, 1.0, 1e-12);
}
