#pragma once

// Barenblatt self-similar solution of ∂ₜu = Δ(u^m) started from δ_{x0}, and
// the exponent algebra behind the fractional regularity of its powers.

namespace nemytskii {

struct BarenblattParams {
    /// 1, or a radial dimension >= 3 (d = 2 is rejected).
    int d = 1;
    double m = 2.0;
    double x0 = 0.0;
    double alpha = 0.0;    ///< d / (d(m-1) + 2)
    double k = 0.0;        ///< α(m-1) / (2md)
    double beta_ss = 0.0;  ///< α / d
    double c_norm = 0.0;   ///< normalizes ∫u(t,·) = 1

    double support_radius(double t) const;
};

/// Computes the exponents and C_norm (bisection on C of the mass integral).
BarenblattParams make_barenblatt(int d, double m, double x0 = 0.0);

/// u(t, x) = t^{-α}(C - k|(x-x0) t^{-β}|²)₊^{1/(m-1)}; x is the radial
/// coordinate |x - x0| + x0 in radial mode. Throws DomainError for t <= 0.
double barenblatt_eval(const BarenblattParams& p, double t, double x);

/// ∫ u(t, x) dx over ℝ^d.
double barenblatt_mass(const BarenblattParams& p, double t);

/// ∫ |x - x0|² u(t, x) dx over ℝ^d.
double barenblatt_moment2(const BarenblattParams& p, double t);

struct RegularityThreshold {
    double s_max;            ///< 2p/m: u^p ∈ L^{m/p}(W^{s,m/p}) forces s < s_max
    bool density_condition;  ///< m(2p - m + 1) > p
};

/// Requires m > 1 and p ∈ (0, m].
RegularityThreshold regularity_threshold(double m, double p);

struct TimeIntegrability {
    double exponent;  ///< e = -α(m-1) - β s m / pw
    bool integrable;  ///< ∫₀ᵀ t^e dt < ∞  ⟺  e > -1
};

TimeIntegrability time_integrability_exponent(const BarenblattParams& p, double pw, double s);

}  // namespace nemytskii
