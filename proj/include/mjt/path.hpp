#ifndef MJT_PATH_HPP
#define MJT_PATH_HPP

#include <cstddef>
#include <vector>

#include "mjt/errors.hpp"
#include "mjt/interp.hpp"
#include "mjt/linalg.hpp"

namespace mjt {

enum class ParamKind { time_t, jacobi_arclength_s };

// A discretized curve: the common currency between all modules. The grid is
// strictly increasing; tangents are d(point)/d(param) on the same grid.
struct PathSample {
    ParamKind kind = ParamKind::time_t;
    std::vector<double> grid;
    std::vector<Vec> points;
    std::vector<Vec> tangents;
    std::vector<double> energies;   // T + U per sample (when known)
    double energy_drift = 0.0;      // max |energy - i1| reported by the integrator

    std::size_t size() const { return grid.size(); }
    int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }

    void check_consistent() const {
        if (points.size() != grid.size() || tangents.size() != grid.size())
            throw GridMismatch("PathSample arrays disagree with grid length");
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (!(grid[i] > grid[i - 1])) throw GridMismatch("PathSample grid not increasing");
    }

    // Hermite interpolation of the curve (points with tangent slopes).
    Vec point_at(double s) const {
        const std::size_t i = locate(grid, s);
        Vec r(points[i].size());
        for (std::size_t c = 0; c < r.size(); ++c)
            r[c] = hermite(s, grid[i], grid[i + 1], points[i][c], points[i + 1][c], tangents[i][c],
                           tangents[i + 1][c]);
        return r;
    }

    Vec tangent_at(double s) const {
        const std::size_t i = locate(grid, s);
        Vec r(points[i].size());
        for (std::size_t c = 0; c < r.size(); ++c)
            r[c] = hermite_deriv(s, grid[i], grid[i + 1], points[i][c], points[i + 1][c],
                                 tangents[i][c], tangents[i + 1][c]);
        return r;
    }

    // Resample onto a uniform grid with n nodes spanning the same range.
    PathSample resample_uniform(std::size_t n) const {
        PathSample r;
        r.kind = kind;
        r.energy_drift = energy_drift;
        r.grid.resize(n);
        r.points.resize(n);
        r.tangents.resize(n);
        const double a = grid.front(), b = grid.back();
        for (std::size_t i = 0; i < n; ++i) {
            const double s = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
            r.grid[i] = s;
            r.points[i] = point_at(s);
            r.tangents[i] = tangent_at(s);
        }
        return r;
    }
};

// Reconstruct tangents from points alone: 4th-order central differences in
// the interior, 2nd-order one-sided stencils at the ends. Assumes a uniform
// grid (callers resample first).
inline std::vector<Vec> tangents_from_points(const std::vector<double>& grid,
                                             const std::vector<Vec>& pts) {
    const std::size_t n = grid.size();
    if (n < 5) throw GridMismatch("tangent reconstruction needs at least five samples");
    const double h = grid[1] - grid[0];
    const std::size_t d = pts.front().size();
    std::vector<Vec> out(n, Vec(d, 0.0));
    for (std::size_t c = 0; c < d; ++c) {
        out[0][c] = (-3 * pts[0][c] + 4 * pts[1][c] - pts[2][c]) / (2 * h);
        out[1][c] = (pts[2][c] - pts[0][c]) / (2 * h);
        for (std::size_t i = 2; i + 2 < n; ++i)
            out[i][c] =
                (-pts[i + 2][c] + 8 * pts[i + 1][c] - 8 * pts[i - 1][c] + pts[i - 2][c]) / (12 * h);
        out[n - 2][c] = (pts[n - 1][c] - pts[n - 3][c]) / (2 * h);
        out[n - 1][c] = (3 * pts[n - 1][c] - 4 * pts[n - 2][c] + pts[n - 3][c]) / (2 * h);
    }
    return out;
}

}  // namespace mjt

#endif
