#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace blowlab {

enum class GridKind { fixed_y, scaled_z };

// Uniform symmetric 1-D grid. For scaled_z the coordinate is z = y/sqrt(s)
// and the physical nodes y_i = z_i sqrt(s_ref) track the similarity time of
// the last regrid.
struct Grid {
    GridKind kind = GridKind::fixed_y;
    double half_width = 10.0;  // in y for fixed_y, in z for scaled_z
    int points = 513;
    double s_ref = 1.0;  // scaled_z only

    std::vector<double> y;

    Grid() = default;
    Grid(GridKind k, double L, int n, double s0 = 1.0)
        : kind(k), half_width(L), points(n), s_ref(s0) {
        if (points < 2) throw std::invalid_argument("Grid: points >= 2 required");
        rebuild();
    }

    double extent() const {
        return kind == GridKind::scaled_z ? half_width * std::sqrt(s_ref) : half_width;
    }
    double dy() const { return 2.0 * extent() / (points - 1); }

    void rebuild() {
        y.resize(static_cast<size_t>(points));
        const double L = extent(), h = dy();
        for (int i = 0; i < points; ++i) y[static_cast<size_t>(i)] = -L + h * i;
    }
};

// Cubic Lagrange interpolation on a uniform grid (4-point stencil, clamped at
// the edges). Values outside the grid are extrapolated from the edge stencil;
// callers that must not extrapolate check coverage themselves.
inline double cubic_interp(const std::vector<double>& xs, const std::vector<double>& vals,
                           double x) {
    const int n = static_cast<int>(xs.size());
    if (n < 4) throw std::invalid_argument("cubic_interp: need >= 4 points");
    const double h = xs[1] - xs[0];
    int i = static_cast<int>(std::floor((x - xs[0]) / h));
    i = std::max(1, std::min(n - 3, i));
    const int base = i - 1;
    double result = 0.0;
    for (int a = 0; a < 4; ++a) {
        double term = vals[static_cast<size_t>(base + a)];
        for (int b = 0; b < 4; ++b) {
            if (a == b) continue;
            term *= (x - xs[static_cast<size_t>(base + b)]) /
                    (xs[static_cast<size_t>(base + a)] - xs[static_cast<size_t>(base + b)]);
        }
        result += term;
    }
    return result;
}

inline bool grid_covers(const std::vector<double>& xs, double x) {
    return !xs.empty() && x >= xs.front() && x <= xs.back();
}

}  // namespace blowlab
