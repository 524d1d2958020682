#include "nemytskii/closed_form.hpp"
#include "nemytskii/error.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nemytskii;

// Oracle values from an independent arbitrary-precision quadrature
// (bisection on C of the mass integral).
TEST(Barenblatt, ExponentsForPme2) {
    const auto p = make_barenblatt(1, 2.0);
    EXPECT_NEAR(p.alpha, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(p.k, 1.0 / 12.0, 1e-15);
    EXPECT_NEAR(p.beta_ss, 1.0 / 3.0, 1e-15);
}

TEST(Barenblatt, NormalizingConstants) {
    EXPECT_NEAR(make_barenblatt(1, 2.0).c_norm, std::cbrt(3.0) / 4.0, 1e-9);
    EXPECT_NEAR(make_barenblatt(1, 3.0).c_norm, 0.183776298473931, 1e-9);
    EXPECT_NEAR(make_barenblatt(1, 1.5).c_norm, 0.566983288816514, 1e-9);
    EXPECT_NEAR(make_barenblatt(1, 4.0).c_norm, 0.113201963127903, 1e-9);
}

TEST(Barenblatt, ClosedFormNormalizationIdentity) {
    // (4/3) C^{3/2} k^{-1/2} = 1 for m = 2.
    const auto p = make_barenblatt(1, 2.0);
    EXPECT_NEAR(4.0 / 3.0 * std::pow(p.c_norm, 1.5) / std::sqrt(p.k), 1.0, 1e-9);
}

TEST(Barenblatt, RejectsBadParameters) {
    EXPECT_THROW(make_barenblatt(1, 1.0), ConfigError);
    EXPECT_THROW(make_barenblatt(2, 2.0), ConfigError);
    const auto p = make_barenblatt(1, 2.0);
    EXPECT_THROW(barenblatt_eval(p, 0.0, 0.0), DomainError);
    EXPECT_THROW(barenblatt_eval(p, -1.0, 0.0), DomainError);
}

TEST(Barenblatt, PointValuesAndSupport) {
    const auto p = make_barenblatt(1, 2.0, 0.5);
    EXPECT_NEAR(barenblatt_eval(p, 1.0, 0.5), std::cbrt(3.0) / 4.0, 1e-9);
    const double R = std::pow(3.0, 2.0 / 3.0);
    EXPECT_NEAR(p.support_radius(1.0), R, 1e-9);
    EXPECT_EQ(barenblatt_eval(p, 1.0, 0.5 + R + 1e-9), 0.0);
    EXPECT_EQ(barenblatt_eval(p, 1.0, 0.5 - R - 1e-3), 0.0);
    EXPECT_EQ(barenblatt_eval(p, 1.0, 100.0), 0.0);
    EXPECT_GT(barenblatt_eval(p, 1.0, 0.5 + R - 1e-6), 0.0);
}

class BarenblattMass : public ::testing::TestWithParam<double> {};

TEST_P(BarenblattMass, UnitMassAtAllTimes) {
    const auto p = make_barenblatt(1, GetParam());
    for (double t : {0.1, 1.0, 10.0}) {
        EXPECT_NEAR(barenblatt_mass(p, t), 1.0, 1e-9) << "t = " << t;
    }
}

INSTANTIATE_TEST_SUITE_P(Exponents, BarenblattMass, ::testing::Values(1.5, 2.0, 3.0, 4.0));

TEST(Barenblatt, RadialModeHasUnitMass) {
    for (int d : {3, 4}) {
        const auto p = make_barenblatt(d, 2.0);
        EXPECT_NEAR(barenblatt_mass(p, 1.0), 1.0, 1e-9);
        EXPECT_NEAR(p.alpha, d / (d + 2.0), 1e-15);
    }
}

TEST(Barenblatt, SecondMoment) {
    const auto p = make_barenblatt(1, 2.0);
    const double m1 = std::pow(3.0, 4.0 / 3.0) / 5.0;
    EXPECT_NEAR(barenblatt_moment2(p, 1.0), m1, 1e-12);
    EXPECT_NEAR(barenblatt_moment2(p, 1.0), 0.865349742184445, 1e-12);
    for (double t : {0.01, 0.1, 2.0, 10.0}) {
        EXPECT_NEAR(barenblatt_moment2(p, t), m1 * std::pow(t, 2.0 / 3.0), 1e-10);
    }
    EXPECT_LT(barenblatt_moment2(p, 1e-9), 1e-5);
}

TEST(Barenblatt, SelfSimilarity) {
    const auto p = make_barenblatt(1, 3.0, -0.25);
    for (double t : {0.2, 3.0}) {
        for (double x = -4.0; x <= 4.0; x += 0.1) {
            const double rhs =
                std::pow(t, -p.alpha) * barenblatt_eval(p, 1.0, (x - p.x0) * std::pow(t, -p.beta_ss) + p.x0);
            EXPECT_NEAR(barenblatt_eval(p, t, x), rhs, 1e-12);
        }
    }
}

TEST(Barenblatt, PdeResidualVanishesUnderRefinement) {
    const auto p = make_barenblatt(1, 2.0);
    auto residual = [&](double h) {
        double worst = 0.0;
        for (double x = -1.0; x <= 1.0; x += 0.05) {
            const double t = 1.0;
            const double ut = (barenblatt_eval(p, t + h, x) - barenblatt_eval(p, t - h, x)) / (2 * h);
            auto w = [&](double y) { return std::pow(barenblatt_eval(p, t, y), 2.0); };
            const double lap = (w(x + h) - 2 * w(x) + w(x - h)) / (h * h);
            worst = std::max(worst, std::abs(ut - lap));
        }
        return worst;
    };
    const double r1 = residual(1e-2);
    const double r2 = residual(5e-3);
    EXPECT_LT(r2, r1);
    EXPECT_GE(std::log2(r1 / r2), 1.0);
}

TEST(RegularityThreshold, Examples) {
    const auto a = regularity_threshold(2.0, 1.0);
    EXPECT_DOUBLE_EQ(a.s_max, 1.0);
    EXPECT_TRUE(a.density_condition);
    EXPECT_DOUBLE_EQ(regularity_threshold(2.0, 2.0).s_max, 2.0);
    EXPECT_FALSE(regularity_threshold(3.0, 1.0).density_condition);
    EXPECT_THROW(regularity_threshold(2.0, 0.0), DomainError);
    EXPECT_THROW(regularity_threshold(2.0, 2.5), DomainError);
}

TEST(TimeIntegrability, Examples) {
    const auto p = make_barenblatt(1, 2.0);
    const auto b = time_integrability_exponent(p, 1.0, 1.0);
    EXPECT_NEAR(b.exponent, -1.0, 1e-15);
    EXPECT_FALSE(b.integrable);
    const auto h = time_integrability_exponent(p, 1.0, 0.5);
    EXPECT_NEAR(h.exponent, -2.0 / 3.0, 1e-15);
    EXPECT_TRUE(h.integrable);
    for (double m : {1.2, 2.0, 5.0}) {
        const auto q = make_barenblatt(1, m);
        const auto z = time_integrability_exponent(q, 1.0, 0.0);
        EXPECT_GT(z.exponent, -1.0);
        EXPECT_TRUE(z.integrable);
    }
}

TEST(TimeIntegrability, FlipsExactlyAtThreshold) {
    // 100-point (m, p, s) sweep including the boundary s = 2p/m itself.
    int checked = 0;
    for (int i = 0; i < 5; ++i) {
        const double m = 1.25 + 0.75 * i;
        const auto bb = make_barenblatt(1, m);
        for (int j = 1; j <= 4; ++j) {
            const double p = m * j / 4.0;
            const double s_max = regularity_threshold(m, p).s_max;
            for (double f : {0.5, 0.9, 1.0, 1.1, 1.5}) {
                const double s = f * s_max;
                const auto ti = time_integrability_exponent(bb, p, s);
                EXPECT_EQ(ti.integrable, s < s_max) << "m=" << m << " p=" << p << " s=" << s;
                EXPECT_NEAR(ti.exponent + 1.0,
                            (2.0 - s * m / p) / ((m - 1.0) + 2.0), 1e-12);
                ++checked;
            }
        }
    }
    EXPECT_EQ(checked, 100);
}
