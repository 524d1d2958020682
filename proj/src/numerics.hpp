#pragma once

// Internal numerical helpers shared by the module implementations.

#include <cmath>
#include <cstddef>
#include <limits>

namespace nemytskii::detail {

/// Safeguarded Newton for an increasing function on a bracket [lo, hi] with
/// f(lo) <= 0 <= f(hi). Newton steps that leave the bracket (or stall) are
/// replaced by bisection. fdf(x, f, df) fills value and derivative.
template <class FDF>
double solve_increasing(FDF&& fdf, double lo, double hi, double guess,
                        double abs_tol = 1e-12, int max_iter = 200) {
    double x = guess;
    if (!(x >= lo && x <= hi)) {
        x = 0.5 * (lo + hi);
    }
    for (int it = 0; it < max_iter; ++it) {
        double f = 0.0;
        double df = 0.0;
        fdf(x, f, df);
        if (f == 0.0) {
            return x;
        }
        if (f < 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        double next = (df > 0.0 && std::isfinite(df)) ? x - f / df : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        const double step = std::abs(next - x);
        x = next;
        const double floor = 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(x));
        if (step <= floor || hi - lo <= floor || std::abs(f) <= abs_tol * 1e-4) {
            break;
        }
    }
    return x;
}

/// Bisection for f(x) = target with f nondecreasing on [lo, hi].
template <class F>
double bisect_increasing(F&& f, double lo, double hi, double target, int iterations = 200) {
    for (int it = 0; it < iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (f(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Tridiagonal solve (Thomas algorithm) in place: sub[i] multiplies x[i-1],
/// super[i] multiplies x[i+1]. rhs is overwritten with the solution.
template <class Vec>
void solve_tridiagonal(const Vec& sub, Vec diag, Vec super, Vec& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * super[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] = (rhs[i] - super[i] * rhs[i + 1]) / diag[i];
    }
}

}  // namespace nemytskii::detail
