#pragma once

// Numerical functionals: local maximal functions and the Lipschitz-type
// estimate, Gagliardo seminorms, Wasserstein-1 in one dimension, weighted L¹
// norms and the Ψ-entropy of a grid field.

#include "nemytskii/coefficients.hpp"
#include "nemytskii/grid_field.hpp"

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace nemytskii {

/// Samples f_i at the uniform abscissae x_i = x_first + i Δ. Each sample is
/// taken as the value on the cell [x_i - Δ/2, x_i + Δ/2] when averages of |f|
/// are needed.
class SampledFunction {
public:
    SampledFunction(double x_first, double spacing, std::vector<double> values,
                    std::optional<std::vector<double>> derivative_values = std::nullopt);

    static SampledFunction sample(double lo, double hi, std::size_t n,
                                  const std::function<double(double)>& f);

    std::size_t size() const noexcept { return values_.size(); }
    double spacing() const noexcept { return spacing_; }
    double x(std::size_t i) const noexcept { return x_first_ + static_cast<double>(i) * spacing_; }
    double lo_edge() const noexcept { return x_first_ - 0.5 * spacing_; }
    double hi_edge() const noexcept { return x(values_.size() - 1) + 0.5 * spacing_; }
    std::span<const double> values() const noexcept { return values_; }
    bool has_derivative() const noexcept { return derivative_.has_value(); }
    std::span<const double> derivative_values() const;

    /// Index of the sample nearest to x (clamped).
    std::size_t nearest(double x) const noexcept;

private:
    double x_first_;
    double spacing_;
    std::vector<double> values_;
    std::optional<std::vector<double>> derivative_;
};

struct WeightFunction {
    std::function<double(double)> phi;
    double alpha_w = 2.0;

    /// Φ(x) = (1 + x²)^γ; needs γ ∈ (0, 1/2] and 2γα > 1 for Φ^{-α} ∈ L¹(ℝ).
    static WeightFunction power(double gamma, double alpha_w = 2.0);
    static WeightFunction unit();
};

// Maximal functions ----------------------------------------------------------

/// Prefix integrals of |f| over its cells, reusable for many evaluations.
class MaximalFunction {
public:
    explicit MaximalFunction(std::span<const double> cell_values, double lo_edge, double spacing);
    explicit MaximalFunction(const SampledFunction& f);

    /// sup over r = j Δ/2 <= R of (1/2r) ∫_{B_r(x) ∩ domain} |f|.
    double operator()(double x, double R = std::numeric_limits<double>::infinity()) const;

    /// ∫_a^b |f| for a <= b (clipped to the domain).
    double integral(double a, double b) const;

private:
    double lo_;
    double dx_;
    std::vector<double> prefix_;
};

double maximal_function(const SampledFunction& f, double R, double x);

struct LipschitzReport {
    std::size_t pairs_checked = 0;
    /// max |f(x)-f(y)| / ((M_R|f'|(x) + M_R|f'|(y)) |x-y|)
    double max_ratio = 0.0;
    /// pairs with ratio > C_d
    std::size_t violations = 0;
    double c_d = 2.0;
};

/// Checks |f(x)-f(y)| <= C_d (M_R|f'|(x) + M_R|f'|(y)) |x-y| at grid points
/// nearest to each pair. Throws InputError without derivative samples.
LipschitzReport lipschitz_estimate_check(const SampledFunction& f,
                                         std::span<const std::pair<double, double>> pairs,
                                         double R = std::numeric_limits<double>::infinity(),
                                         double c_d = 2.0);

// Gagliardo seminorm ------------------------------------------------------------

struct GagliardoEstimate {
    double value = 0.0;         ///< at the full resolution
    double coarse_value = 0.0;  ///< on every second sample
    bool converged = false;     ///< within 5% of each other
    bool divergent_trend = false;  ///< at least 2× growth under refinement
};

/// [f]_{W^{s,p}} = (∫∫ |f(x)-f(y)|^p / |x-y|^{1+sp})^{1/p} for f supported in
/// the sampled window. Off-diagonal cells by midpoint sums, the diagonal
/// cell by the exact integral of the local-slope model, the exterior
/// (where f = 0) in closed form.
double gagliardo_value(const SampledFunction& f, double s, double p);
GagliardoEstimate gagliardo_seminorm(const SampledFunction& f, double s, double p);

// Distances and norms --------------------------------------------------------------

/// W₁ between the empirical law of `samples` and a unit-mass grid density.
double w1_distance(std::span<const double> samples, const GridField& nu);
double w1_distance(const GridField& mu, const GridField& nu);
/// W₁ between two empirical laws with equal weights per sample.
double w1_distance_samples(std::span<const double> a, std::span<const double> b);

double weighted_l1_norm(const GridField& u, const WeightFunction& w);

/// Σ Ψ(u_i) Δx.
double entropy_of_field(const GridField& u, const NonlinearitySpec& spec);

}  // namespace nemytskii
