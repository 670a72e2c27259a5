#ifndef MJT_INTERP_HPP
#define MJT_INTERP_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "mjt/errors.hpp"

namespace mjt {

// Cubic Hermite value on [x0,x1] from endpoint values/slopes.
inline double hermite(double x, double x0, double x1, double f0, double f1, double d0, double d1) {
    const double h = x1 - x0;
    const double t = (x - x0) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * h * d0 +
           (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * h * d1;
}

inline double hermite_deriv(double x, double x0, double x1, double f0, double f1, double d0,
                            double d1) {
    const double h = x1 - x0;
    const double t = (x - x0) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * f0 + (3 * t2 - 4 * t + 1) * h * d0 + (-6 * t2 + 6 * t) * f1 +
            (3 * t2 - 2 * t) * h * d1) /
           h;
}

// Exact integral of the Hermite cubic over its own interval.
inline double hermite_integral(double x0, double x1, double f0, double f1, double d0, double d1) {
    const double h = x1 - x0;
    return h * (0.5 * (f0 + f1) + h * (d0 - d1) / 12.0);
}

// Index of the grid interval containing x (clamped to the ends).
inline std::size_t locate(const std::vector<double>& grid, double x) {
    if (x <= grid.front()) return 0;
    if (x >= grid.back()) return grid.size() - 2;
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    return static_cast<std::size_t>(it - grid.begin()) - 1;
}

// Piecewise-cubic sampled function with known derivatives.
struct HermiteSeries {
    std::vector<double> x;
    std::vector<double> f;
    std::vector<double> df;

    double value(double xi) const {
        const std::size_t i = locate(x, xi);
        return hermite(xi, x[i], x[i + 1], f[i], f[i + 1], df[i], df[i + 1]);
    }
    double deriv(double xi) const {
        const std::size_t i = locate(x, xi);
        return hermite_deriv(xi, x[i], x[i + 1], f[i], f[i + 1], df[i], df[i + 1]);
    }

    // Cumulative integral at the grid nodes (4th-order composite rule).
    std::vector<double> cumulative() const {
        std::vector<double> F(x.size(), 0.0);
        for (std::size_t i = 0; i + 1 < x.size(); ++i)
            F[i + 1] = F[i] + hermite_integral(x[i], x[i + 1], f[i], f[i + 1], df[i], df[i + 1]);
        return F;
    }
};

// Inverse of a strictly increasing cumulative map F (nodes F over grid x):
// returns x with F(x) = target, by bisection polished with Newton on the
// Hermite segment. dF must hold the (positive) integrand values at nodes.
inline double invert_monotone(const std::vector<double>& x, const std::vector<double>& F,
                              const std::vector<double>& dF, double target) {
    if (target <= F.front()) return x.front();
    if (target >= F.back()) return x.back();
    auto it = std::upper_bound(F.begin(), F.end(), target);
    std::size_t i = static_cast<std::size_t>(it - F.begin()) - 1;
    double lo = x[i], hi = x[i + 1];
    // Antiderivative of the Hermite cubic modelling the integrand dF on the
    // segment; slopes of dF estimated from neighbors (Catmull-Rom).
    const double h = x[i + 1] - x[i];
    const double d0 = dF[i], d1 = dF[i + 1];
    double m0 = 0, m1 = 0;
    if (i > 0)
        m0 = (dF[i + 1] - dF[i - 1]) / (x[i + 1] - x[i - 1]);
    else
        m0 = (dF[i + 1] - dF[i]) / h;
    if (i + 2 < x.size())
        m1 = (dF[i + 2] - dF[i]) / (x[i + 2] - x[i]);
    else
        m1 = (dF[i + 1] - dF[i]) / h;
    auto seg_integral = [&](double xi) {
        // integral of Hermite(dF) from x[i] to xi
        const double t = (xi - x[i]) / h;
        const double t2 = t * t, t3 = t2 * t, t4 = t2 * t2;
        const double H00 = 0.5 * t4 - t3 + t;          // int of 2t^3-3t^2+1
        const double H10 = 0.25 * t4 - (2.0 / 3) * t3 + 0.5 * t2;
        const double H01 = -0.5 * t4 + t3;
        const double H11 = 0.25 * t4 - t3 / 3.0;
        return h * (H00 * d0 + H01 * d1) + h * h * (H10 * m0 + H11 * m1);
    };
    const double goal = target - F[i];
    for (int it2 = 0; it2 < 200; ++it2) {
        const double mid = 0.5 * (lo + hi);
        const double v = seg_integral(mid);
        if (v < goal)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15 * (1.0 + std::fabs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

// Composite Simpson over a uniform grid of odd length.
inline double simpson(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    double s = f[0] + f[n - 1];
    for (std::size_t i = 1; i + 1 < n; ++i) s += f[i] * ((i % 2) ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Evaluate fn over [a,b] with n intervals (n even) and Simpson-integrate.
inline double simpson_of(const std::function<double(double)>& fn, double a, double b, int n) {
    if (n % 2) ++n;
    std::vector<double> f(static_cast<std::size_t>(n) + 1);
    const double h = (b - a) / n;
    for (int i = 0; i <= n; ++i) f[static_cast<std::size_t>(i)] = fn(a + i * h);
    return simpson(f, h);
}

// Bracketed scalar root of a monotone function, bisection + Newton polish.
inline double solve_monotone(const std::function<double(double)>& fn, double lo, double hi,
                             double xtol = 1e-15, int max_iter = 200) {
    double flo = fn(lo), fhi = fn(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if ((flo > 0) == (fhi > 0)) throw RootNotConverged("solve_monotone: no sign change in bracket");
    for (int i = 0; i < max_iter; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = fn(mid);
        if (fm == 0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo < xtol * (1.0 + std::fabs(lo) + std::fabs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace mjt

#endif
