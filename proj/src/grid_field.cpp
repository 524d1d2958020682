#include "nemytskii/grid_field.hpp"

#include "nemytskii/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nemytskii {

GridField::GridField(double lo, double hi, std::vector<double> values)
    : lo_(lo), hi_(hi), values_(std::move(values)) {
    if (!(hi_ > lo_) || !std::isfinite(lo_) || !std::isfinite(hi_)) {
        throw InputError("grid needs finite lo < hi");
    }
    if (values_.size() < kMinCells) {
        throw InputError("grid needs at least " + std::to_string(kMinCells) + " cells (got " +
                         std::to_string(values_.size()) + ")");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
            throw InputError("grid value " + std::to_string(i) + " is negative or not finite");
        }
    }
}

GridField GridField::zeros(double lo, double hi, std::size_t n_cells) {
    return GridField(lo, hi, std::vector<double>(n_cells, 0.0));
}

GridField GridField::sample(double lo, double hi, std::size_t n_cells,
                            const std::function<double(double)>& f) {
    std::vector<double> v(n_cells);
    const double dx = (hi - lo) / static_cast<double>(n_cells);
    for (std::size_t i = 0; i < n_cells; ++i) {
        v[i] = f(lo + (static_cast<double>(i) + 0.5) * dx);
    }
    return GridField(lo, hi, std::move(v));
}

double GridField::mass() const {
    double s = 0.0;
    for (double v : values_) {
        s += v;
    }
    return s * cell_width();
}

double GridField::linf_norm() const {
    return *std::max_element(values_.begin(), values_.end());
}

GridField GridField::normalized() const {
    const double total = mass();
    if (!(total > 0.0)) {
        throw InputError("cannot normalize a field with zero mass");
    }
    std::vector<double> v(values_);
    for (double& x : v) {
        x /= total;
    }
    return GridField(lo_, hi_, std::move(v));
}

bool GridField::same_grid(const GridField& other) const noexcept {
    return lo_ == other.lo_ && hi_ == other.hi_ && values_.size() == other.values_.size();
}

double l1_distance(const GridField& a, const GridField& b) {
    if (!a.same_grid(b)) {
        throw InputError("l1_distance needs fields on the same grid");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.n_cells(); ++i) {
        s += std::abs(a[i] - b[i]);
    }
    return s * a.cell_width();
}

}  // namespace nemytskii
