#include "nemytskii/coefficients.hpp"
#include "nemytskii/error.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace nemytskii;

namespace {

const NonlinearitySpec pme2 = NonlinearitySpec::power_law(2.0);
const NonlinearitySpec pme3 = NonlinearitySpec::power_law(3.0);

DriftSpec driftless() { return DriftSpec{VectorField::zero(), ScalarResponse::zero()}; }

}  // namespace

TEST(Beta, PowerLawValues) {
    EXPECT_DOUBLE_EQ(beta_eval(pme2, 0.5), 0.25);
    EXPECT_EQ(beta_eval(pme2, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(beta_eval(pme3, -1.0), -1.0);
}

TEST(Beta, RejectsExponentAtMostOne) {
    EXPECT_THROW(NonlinearitySpec::power_law(1.0), ConfigError);
    EXPECT_THROW(NonlinearitySpec::power_law(0.5), ConfigError);
    EXPECT_THROW(NonlinearitySpec::power_law(2.0, 1.5), ConfigError);
}

TEST(Beta, CustomTableMatchesSampledFunction) {
    std::vector<double> samples;
    const double r_max = 4.0;
    const int n = 401;
    for (int j = 0; j < n; ++j) {
        const double r = r_max * j / (n - 1);
        samples.push_back(r * r + r);
    }
    const auto spec = NonlinearitySpec::custom(samples, r_max, 2.0);
    for (double r : {0.3, 1.234, 3.9}) {
        EXPECT_NEAR(spec.beta(r), r * r + r, 1e-6);
        EXPECT_NEAR(spec.beta(-r), -(r * r + r), 1e-6);
        EXPECT_NEAR(spec.beta_prime(r), 2 * r + 1, 1e-4);
    }
    // Linear continuation past the table.
    EXPECT_NEAR(spec.beta(5.0), 20.0 + 9.0 * 1.0, 1e-3);
}

TEST(Beta, CustomTableRejectsNonMonotoneData) {
    EXPECT_THROW(NonlinearitySpec::custom({0.0, 1.0, 0.5, 2.0, 3.0}, 1.0, 2.0), ConfigError);
    EXPECT_THROW(NonlinearitySpec::custom({0.1, 1.0, 2.0, 3.0}, 1.0, 2.0), ConfigError);
    EXPECT_THROW(NonlinearitySpec::custom({0.0, 1.0, 2.0}, 1.0, 2.0), ConfigError);
}

TEST(SigmaSquared, Values) {
    EXPECT_DOUBLE_EQ(sigma_squared(pme2, 0.5), 1.0);
    EXPECT_EQ(sigma_squared(pme2, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(sigma_squared(pme3, 2.0), 8.0);
    EXPECT_THROW(sigma_squared(pme2, -0.1), DomainError);
}

TEST(SigmaSquared, ContinuousAtZeroAndBoundedByPowerLaw) {
    // sigma² <= 2 C_K r^{m-1} with C_K = 1 for the pure power law.
    for (double m : {1.5, 2.0, 3.0}) {
        const auto spec = NonlinearitySpec::power_law(m);
        for (double r = 1e-8; r <= 10.0; r *= 1.7) {
            EXPECT_LE(sigma_squared(spec, r), 2.0 * std::pow(r, m - 1.0) * (1 + 1e-14));
        }
        EXPECT_LT(sigma_squared(spec, 1e-12), 1e-5);
    }
}

TEST(Yosida, ExamplesFromClosedForm) {
    EXPECT_NEAR(yosida_resolvent(pme3, 1.0, 2.0), 1.0, 1e-14);
    EXPECT_EQ(yosida_resolvent(pme2, 1.0, 0.0), 0.0);
    EXPECT_NEAR(yosida_resolvent(pme2, 0.5, 1.0), std::sqrt(3.0) - 1.0, 1e-13);
    EXPECT_NEAR(beta_epsilon(pme3, 1.0, 2.0), 1.0, 1e-13);
    EXPECT_NEAR(beta_tilde_epsilon(pme3, 1.0, 2.0), 3.0, 1e-13);
    EXPECT_EQ(beta_epsilon(pme2, 0.5, 0.0), 0.0);
    EXPECT_EQ(beta_tilde_epsilon(pme2, 0.5, 0.0), 0.0);
    EXPECT_NEAR(beta_epsilon(pme2, 0.5, 1.0), 4.0 - 2.0 * std::sqrt(3.0), 1e-13);
    EXPECT_THROW(yosida_resolvent(pme2, 0.0, 1.0), DomainError);
}

TEST(Yosida, ResolventEquationHolds) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> r_dist(-20.0, 20.0);
    for (double m : {1.5, 2.0, 4.0}) {
        const auto spec = NonlinearitySpec::power_law(m);
        for (double eps : {1e-6, 1e-3, 0.1, 1.0}) {
            for (int k = 0; k < 50; ++k) {
                const double r = r_dist(gen);
                const double g = yosida_resolvent(spec, eps, r);
                EXPECT_NEAR(g + eps * spec.beta(g), r, 1e-12 * std::max(1.0, std::abs(r)));
                EXPECT_LE(std::abs(g), std::abs(r));
            }
        }
    }
}

TEST(Yosida, NonexpansiveInR) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> r_dist(-5.0, 5.0);
    for (int k = 0; k < 500; ++k) {
        const double a = r_dist(gen);
        const double b = r_dist(gen);
        const double ga = yosida_resolvent(pme3, 0.3, a);
        const double gb = yosida_resolvent(pme3, 0.3, b);
        EXPECT_LE(std::abs(ga - gb), std::abs(a - b) * (1 + 1e-12) + 1e-15);
        if (a < b) {
            EXPECT_LE(ga, gb);
        }
    }
}

TEST(Yosida, BetaEpsilonConvergesToBeta) {
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        double err = 0.0;
        for (double r = 0.0; r <= 3.0; r += 0.05) {
            err = std::max(err, std::abs(beta_epsilon(pme2, eps, r) - pme2.beta(r)));
        }
        EXPECT_LT(err, prev);
        prev = err;
    }
}

TEST(Yosida, BetaTildeSlopeAtLeastEpsilon) {
    for (double r = -3.0; r <= 3.0; r += 0.1) {
        EXPECT_GE(beta_tilde_epsilon_prime(pme2, 1e-3, r), 1e-3);
        const double h = 1e-6;
        const double fd =
            (beta_tilde_epsilon(pme2, 1e-3, r + h) - beta_tilde_epsilon(pme2, 1e-3, r - h)) / (2 * h);
        EXPECT_NEAR(beta_tilde_epsilon_prime(pme2, 1e-3, r), fd, 1e-6);
    }
}

TEST(Regularization, CutoffRadiusIsInverseEpsilon) {
    const auto p = RegularizationParams::from_epsilon(0.25);
    EXPECT_EQ(p.cutoff_radius, 4.0);
    EXPECT_EQ(p.mollifier_width, 0.25);
    EXPECT_THROW(RegularizationParams::from_epsilon(0.0), ConfigError);
    EXPECT_THROW(RegularizationParams::from_epsilon(1.0), ConfigError);
}

TEST(MollifiedB, ConstantPassesThrough) {
    const DriftSpec d{VectorField::tanh_profile(1.0), ScalarResponse::constant(0.7)};
    for (double eps : {0.5, 1e-3}) {
        for (double r : {-2.0, 0.0, 3.0}) {
            EXPECT_EQ(mollified_b(d, eps, r), 0.7);
        }
    }
}

TEST(MollifiedB, ClippedIdentityConvergesAndStaysNonnegative) {
    const DriftSpec d{VectorField::tanh_profile(1.0), ScalarResponse::clipped_identity()};
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        EXPECT_NEAR(mollified_b(d, eps, 0.5), 0.5, 2.0 * eps);
    }
    for (double r = -2.0; r <= 2.0; r += 0.01) {
        EXPECT_GE(mollified_b(d, 1e-2, r), 0.0);
    }
}

TEST(MollifierBump, UnitMass) {
    const double w = 0.3;
    boost::math::quadrature::tanh_sinh<double> ts;
    EXPECT_NEAR(ts.integrate([&](double s) { return mollifier(s, w); }, -w, w), 1.0, 1e-12);
    EXPECT_EQ(mollifier(0.31, w), 0.0);
}

TEST(CutoffE, RampBehaviour) {
    const DriftSpec zero = driftless();
    EXPECT_EQ(cutoff_E(zero, 0.1, 3.0), 0.0);
    const DriftSpec d{VectorField::tanh_profile(2.0), ScalarResponse::constant(1.0)};
    const double eps = 0.1;
    EXPECT_EQ(cutoff_E(d, eps, 9.5), d.E.value(9.5));
    EXPECT_EQ(cutoff_E(d, eps, -10.0), d.E.value(-10.0));
    EXPECT_NEAR(cutoff_E(d, eps, 10.5), 0.5 * d.E.value(10.5), 1e-15);
    EXPECT_EQ(cutoff_E(d, eps, 11.0), 0.0);
    EXPECT_EQ(cutoff_E(d, eps, -12.0), 0.0);
}

TEST(CutoffE, SquareIntegrableFieldIsNotCut) {
    const DriftSpec d{VectorField::gaussian_dipole(1.0, 1.0), ScalarResponse::constant(1.0)};
    EXPECT_EQ(cutoff_E(d, 0.5, 5.0), d.E.value(5.0));
}

TEST(CapitalG, Values) {
    EXPECT_NEAR(capital_G(NonlinearitySpec::power_law(2.0, 0.5), 1.0), 2.0, 1e-12);
    EXPECT_EQ(capital_G(pme2, 0.0), 0.0);
    EXPECT_NEAR(capital_G(pme2, 1.7), 1.7, 1e-14);
    EXPECT_THROW(capital_G(NonlinearitySpec::power_law(2.0, 1.0), 1.0), ConfigError);
}

TEST(CapitalG, InverseRoundTrip) {
    const auto spec = NonlinearitySpec::power_law(3.0, 0.4);
    double prev = -1.0;
    for (double y = 0.0; y <= 5.0; y += 0.125) {
        const double r = capital_G_inverse(spec, y);
        EXPECT_NEAR(capital_G(spec, r), y, 1e-10);
        EXPECT_GT(r, prev);
        prev = r;
    }
}

TEST(CapitalG, CustomTableMatchesPowerLaw) {
    std::vector<double> samples;
    for (int j = 0; j <= 400; ++j) {
        const double r = 2.0 * j / 400.0;
        samples.push_back(r * r);
    }
    const auto custom = NonlinearitySpec::custom(samples, 2.0, 2.0, 0.5);
    const auto exact = NonlinearitySpec::power_law(2.0, 0.5);
    EXPECT_NEAR(capital_G(custom, 1.0), capital_G(exact, 1.0), 1e-3);
}

TEST(EntropyPsi, Values) {
    EXPECT_NEAR(entropy_Psi(pme2, 1.0), -2.0, 1e-14);
    EXPECT_EQ(entropy_Psi(pme2, 0.0), 0.0);
    EXPECT_NEAR(entropy_Psi(pme2, std::exp(1.0)), 0.0, 1e-14);
}

TEST(EntropyPsi, AgreesWithQuadratureOfLogBeta) {
    boost::math::quadrature::tanh_sinh<double> ts;
    for (double m : {1.5, 2.0, 3.0}) {
        const auto spec = NonlinearitySpec::power_law(m);
        for (double r : {0.01, 0.5, 1.0, 4.0, 10.0}) {
            const double q = ts.integrate(
                [&](double s) {
                    // β(s) underflows before s does.
                    const double b = spec.beta(s);
                    return b > 0.0 ? std::log(b) : m * std::log(s);
                },
                0.0, r);
            EXPECT_NEAR(entropy_Psi(spec, r), q, 1e-8);
        }
    }
}

TEST(LambdaZero, Formula) {
    EXPECT_TRUE(std::isinf(lambda_zero(driftless())));
    const DriftSpec one{VectorField::tanh_profile(1.0), ScalarResponse::constant(1.0)};
    EXPECT_DOUBLE_EQ(one.drift_bound(), 1.0);
    EXPECT_DOUBLE_EQ(lambda_zero(one), 0.5);
    const DriftSpec four{VectorField::tanh_profile(4.0), ScalarResponse::zero()};
    EXPECT_DOUBLE_EQ(lambda_zero(four), 0.25);
}

TEST(Hypotheses, MonomialCriterion) {
    const DriftSpec lin{VectorField::tanh_profile(1.0), ScalarResponse::monomial(1.0, 1.0)};
    const auto ok = check_hypotheses(pme2, lin);
    ASSERT_NE(ok.find("H2b.ii.monomial"), nullptr);
    EXPECT_TRUE(ok.find("H2b.ii.monomial")->passed);

    const auto bad = check_hypotheses(NonlinearitySpec::power_law(4.0), lin);
    ASSERT_NE(bad.find("H2b.ii.monomial"), nullptr);
    EXPECT_FALSE(bad.find("H2b.ii.monomial")->passed);
    EXPECT_FALSE(bad.all_passed());
}

TEST(Hypotheses, DriftlessPassesVacuously) {
    const auto rep = check_hypotheses(pme2, driftless());
    EXPECT_TRUE(rep.all_passed());
    for (const auto& c : rep.clauses) {
        if (c.id.rfind("H2", 0) == 0) {
            EXPECT_TRUE(c.passed) << c.id << ": " << c.witness;
        }
    }
}

TEST(Hypotheses, PowerBoundsHoldForPowerLaw) {
    const auto rep = check_hypotheses(pme3, driftless());
    ASSERT_NE(rep.find("H1.power_bounds"), nullptr);
    EXPECT_TRUE(rep.find("H1.power_bounds")->passed);
    EXPECT_TRUE(rep.find("H1.beta_monotone")->passed);
}

TEST(Hypotheses, MonotonicitySurrogateForTanh) {
    // E = c tanh: <E(x)-E(y), x-y> <= c|x-y|² so ι = c/2 works.
    const DriftSpec d{VectorField::tanh_profile(2.0), ScalarResponse::constant(1.0)};
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> x_dist(-5.0, 5.0);
    for (int k = 0; k < 1000; ++k) {
        const double x = x_dist(gen);
        const double y = x_dist(gen);
        EXPECT_LE((d.E.value(x) - d.E.value(y)) * (x - y), 2.0 * d.E.iota * (x - y) * (x - y) + 1e-15);
    }
}
