// Small interpolation kit for sampled fields on strictly increasing grids:
// 4-point Lagrange (cubic) with graceful degradation to linear near the ends.
#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ringblow {

// index of the last node <= x, clamped to [0, n-2]
inline std::size_t bracket_index(const std::vector<double>& xs, double x) {
    if (xs.size() < 2) throw std::invalid_argument("bracket_index: need >= 2 nodes");
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::ptrdiff_t i = (it - xs.begin()) - 1;
    if (i < 0) i = 0;
    if (i > static_cast<std::ptrdiff_t>(xs.size()) - 2) i = xs.size() - 2;
    return static_cast<std::size_t>(i);
}

inline double interp_linear(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    std::size_t i = bracket_index(xs, x);
    double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return ys[i] + t * (ys[i + 1] - ys[i]);
}

// 4-point Lagrange centered on the bracketing interval; linear at the edges.
inline double interp_cubic(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    const std::size_t n = xs.size();
    if (n < 4) return interp_linear(xs, ys, x);
    std::size_t i = bracket_index(xs, x);
    if (i == 0 || i >= n - 2) return interp_linear(xs, ys, x);
    const double x0 = xs[i - 1], x1 = xs[i], x2 = xs[i + 1], x3 = xs[i + 2];
    const double y0 = ys[i - 1], y1 = ys[i], y2 = ys[i + 1], y3 = ys[i + 2];
    double l0 = (x - x1) * (x - x2) * (x - x3) / ((x0 - x1) * (x0 - x2) * (x0 - x3));
    double l1 = (x - x0) * (x - x2) * (x - x3) / ((x1 - x0) * (x1 - x2) * (x1 - x3));
    double l2 = (x - x0) * (x - x1) * (x - x3) / ((x2 - x0) * (x2 - x1) * (x2 - x3));
    double l3 = (x - x0) * (x - x1) * (x - x2) / ((x3 - x0) * (x3 - x1) * (x3 - x2));
    return y0 * l0 + y1 * l1 + y2 * l2 + y3 * l3;
}

}  // namespace ringblow
