#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace nemytskii {

/// Nonnegative cell-centered density on a uniform grid over [lo, hi].
class GridField {
public:
    static constexpr std::size_t kMinCells = 16;

    /// Throws InputError on fewer than kMinCells cells, hi <= lo, or any
    /// negative / non-finite value.
    GridField(double lo, double hi, std::vector<double> values);

    static GridField zeros(double lo, double hi, std::size_t n_cells);

    /// Samples f at cell centers; negative samples are an error.
    static GridField sample(double lo, double hi, std::size_t n_cells,
                            const std::function<double(double)>& f);

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    std::size_t n_cells() const noexcept { return values_.size(); }
    double cell_width() const noexcept { return (hi_ - lo_) / static_cast<double>(values_.size()); }
    double center(std::size_t i) const noexcept {
        return lo_ + (static_cast<double>(i) + 0.5) * cell_width();
    }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    double mass() const;
    double linf_norm() const;

    /// Rescaled copy with unit mass. Throws InputError if mass is zero.
    GridField normalized() const;

    bool same_grid(const GridField& other) const noexcept;

private:
    double lo_;
    double hi_;
    std::vector<double> values_;
};

/// Σ |a_i - b_i| Δx; throws InputError if the grids differ.
double l1_distance(const GridField& a, const GridField& b);

}  // namespace nemytskii
