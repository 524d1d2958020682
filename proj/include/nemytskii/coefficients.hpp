#pragma once

// Nonlinear coefficients of the Nemytskii-type Fokker-Planck / McKean-Vlasov
// pair: the diffusivity β, the drift field E and the scalar response b,
// their Yosida/mollifier/cutoff regularizations, and sampled hypothesis checks.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nemytskii {

class NonlinearitySpec {
public:
    enum class Kind { power_law, custom };

    /// β(r) = |r|^{m-1} r.
    static NonlinearitySpec power_law(double m, double zeta = 0.0);

    /// β sampled on the uniform grid r_j = j * r_max / (n-1), j = 0..n-1,
    /// interpolated by a C² cubic B-spline. samples[0] must be 0 and the
    /// interpolant strictly increasing; β is extended oddly to r < 0 and
    /// linearly (with the end slope) beyond r_max.
    static NonlinearitySpec custom(std::vector<double> samples, double r_max,
                                   double m, double zeta = 0.0);

    Kind kind() const noexcept { return kind_; }
    bool is_power_law() const noexcept { return kind_ == Kind::power_law; }
    double m() const noexcept { return m_; }
    double zeta() const noexcept { return zeta_; }

    double beta(double r) const;
    double beta_prime(double r) const;
    double beta_inverse(double y) const;

private:
    struct Table;

    NonlinearitySpec(Kind kind, double m, double zeta, std::shared_ptr<const Table> table);

    Kind kind_;
    double m_;
    double zeta_;
    std::shared_ptr<const Table> table_;
};

/// Vector field E on ℝ with its divergence and the norms the theory needs.
struct VectorField {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> divergence;
    double sup_abs = 0.0;
    double sup_div_minus = 0.0;
    /// ‖(div E)⁻ + |E|‖∞
    double sup_div_minus_plus_abs = 0.0;
    /// ι_R ≡ iota satisfies ⟨E(x)-E(y), x-y⟩ <= (ι(x)+ι(y))|x-y|² on every ball.
    double iota = 0.0;
    /// |E| ∈ L² and div E ∈ L² + L∞: the cutoff η_ε is skipped.
    bool square_integrable = false;
    bool is_zero = false;

    static VectorField zero();
    /// E(x) = strength * tanh(x); strength < 0 pulls mass toward the origin.
    static VectorField tanh_profile(double strength);
    /// E(x) = amplitude * x * exp(-x²/(2 w²)); square integrable.
    static VectorField gaussian_dipole(double amplitude, double width);
};

/// Bounded nonnegative scalar response b(r).
struct ScalarResponse {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    double sup_abs = 0.0;
    bool is_constant = false;
    /// Set when b(r) = r^l on [0, r_sat].
    std::optional<double> monomial_exponent;

    static ScalarResponse zero();
    static ScalarResponse constant(double c);
    /// b(r) = r^l on [0, r_sat], continued C¹ by a tanh saturation; b = 0 for r < 0.
    static ScalarResponse monomial(double l, double r_sat = 1.0);
    /// b(r) = min(max(r, 0), 1).
    static ScalarResponse clipped_identity();
};

struct DriftSpec {
    VectorField E = VectorField::zero();
    ScalarResponse b = ScalarResponse::zero();

    double sup_norm_E() const noexcept { return E.sup_abs; }
    double sup_norm_b() const noexcept { return b.sup_abs; }
    double div_E_minus_sup() const noexcept { return E.sup_div_minus; }
    /// ‖(div E)⁻ + |E|‖∞
    double drift_bound() const noexcept { return E.sup_div_minus_plus_abs; }
    /// No transport term at all (E ≡ 0 or b ≡ 0).
    bool is_driftless() const noexcept;
};

struct RegularizationParams {
    double epsilon;
    double mollifier_width;
    double cutoff_radius;

    /// mollifier_width = ε, cutoff_radius = 1/ε.
    static RegularizationParams from_epsilon(double epsilon);
};

// Diffusivity and its regularizations ---------------------------------------

double beta_eval(const NonlinearitySpec& spec, double r);

/// σ²(r) = 2β(r)/r for r > 0 and 2β'(0) at r = 0.
double sigma_squared(const NonlinearitySpec& spec, double r);

/// g_ε(r) = (I + εβ)^{-1}(r).
double yosida_resolvent(const NonlinearitySpec& spec, double epsilon, double r);

/// β_ε(r) = β(g_ε(r)) = (r - g_ε(r))/ε.
double beta_epsilon(const NonlinearitySpec& spec, double epsilon, double r);

/// β̃_ε(r) = β_ε(r) + εr.
double beta_tilde_epsilon(const NonlinearitySpec& spec, double epsilon, double r);

/// d/dr β̃_ε(r) = β'(g)/(1 + εβ'(g)) + ε with g = g_ε(r).
double beta_tilde_epsilon_prime(const NonlinearitySpec& spec, double epsilon, double r);

// Drift regularizations -----------------------------------------------------

/// Normalized bump ρ_w(s) ∝ (1 - (s/w)²)² on [-w, w].
double mollifier(double s, double width);

/// b_ε(r) = (b ∗ ρ_ε)(r) / (1 + ε|r|), or b itself when b is constant.
double mollified_b(const DriftSpec& drift, double epsilon, double r);
double mollified_b_prime(const DriftSpec& drift, double epsilon, double r);

/// η_ε(x) E(x); η_ε = 1 on |x| <= 1/ε, decays linearly to 0 on [1/ε, 1/ε + 1].
double cutoff_E(const DriftSpec& drift, double epsilon, double x);

// Functionals of β ----------------------------------------------------------

/// G(r) = ∫₀ʳ (β⁻¹(s²))^{-ζ} ds. Throws ConfigError if 2ζ/m >= 1.
double capital_G(const NonlinearitySpec& spec, double r);
double capital_G_inverse(const NonlinearitySpec& spec, double y);

/// Ψ(r) = ∫₀ʳ ln β(s) ds, Ψ(0) = 0.
double entropy_Psi(const NonlinearitySpec& spec, double r);

/// λ₀ = (K + K^{1/2}‖b‖∞)⁻¹ with K = ‖(div E)⁻ + |E|‖∞; +∞ when K = 0.
double lambda_zero(const DriftSpec& drift);

// Hypotheses ----------------------------------------------------------------

struct ClauseResult {
    std::string id;
    bool passed = false;
    /// Sampled evidence only; failure does not prove the clause false.
    bool advisory = false;
    std::string witness;
};

struct HypothesesReport {
    std::vector<ClauseResult> clauses;

    bool all_passed() const;
    const ClauseResult* find(const std::string& id) const;
};

HypothesesReport check_hypotheses(const NonlinearitySpec& spec, const DriftSpec& drift);

}  // namespace nemytskii
