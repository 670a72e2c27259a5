#ifndef MJT_LINALG_HPP
#define MJT_LINALG_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "mjt/errors.hpp"

namespace mjt {

using Vec = std::vector<double>;

inline Vec operator+(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec operator-(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec operator*(double c, const Vec& a) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

inline void axpy(double c, const Vec& x, Vec& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

// Dense row-major matrix, sized for chart dimensions (2-4), not for scale.
struct Mat {
    int n = 0, m = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int rows, int cols) : n(rows), m(cols), a(static_cast<std::size_t>(rows) * cols, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * m + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * m + j]; }

    static Mat identity(int d) {
        Mat I(d, d);
        for (int i = 0; i < d; ++i) I(i, i) = 1.0;
        return I;
    }
};

inline Mat operator*(double c, const Mat& A) {
    Mat R = A;
    for (auto& x : R.a) x *= c;
    return R;
}

inline Vec matvec(const Mat& A, const Vec& x) {
    Vec r(A.n, 0.0);
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.m; ++j) r[i] += A(i, j) * x[j];
    return r;
}

// <u, v> in the metric given by a symmetric matrix g.
inline double metric_dot(const Mat& g, const Vec& u, const Vec& v) {
    double s = 0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.m; ++j) s += g(i, j) * u[i] * v[j];
    return s;
}

inline double metric_norm(const Mat& g, const Vec& u) {
    return std::sqrt(std::fmax(metric_dot(g, u, u), 0.0));
}

// LU solve with partial pivoting; throws DegenerateMetric on rank loss.
inline Vec solve(Mat A, Vec b) {
    const int n = A.n;
    std::vector<int> piv(n);
    for (int i = 0; i < n; ++i) piv[i] = i;
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(A(i, k)) > std::fabs(A(p, k))) p = i;
        if (std::fabs(A(p, k)) < 1e-300) throw DegenerateMetric("singular matrix in solve");
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(p, j));
            std::swap(b[k], b[p]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double f = A(i, k) / A(k, k);
            A(i, k) = 0;
            for (int j = k + 1; j < n; ++j) A(i, j) -= f * A(k, j);
            b[i] -= f * b[k];
        }
    }
    Vec x(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
        x[i] = s / A(i, i);
    }
    return x;
}

inline Mat inverse(const Mat& A) {
    const int n = A.n;
    Mat R(n, n);
    for (int j = 0; j < n; ++j) {
        Vec e(n, 0.0);
        e[j] = 1.0;
        Vec col = solve(A, e);
        for (int i = 0; i < n; ++i) R(i, j) = col[i];
    }
    return R;
}

// In-place Cholesky test for symmetric positive definiteness.
inline bool is_positive_definite(Mat A, double tol = 0.0) {
    const int n = A.n;
    for (int k = 0; k < n; ++k) {
        double d = A(k, k);
        for (int j = 0; j < k; ++j) d -= A(k, j) * A(k, j);
        if (!(d > tol)) return false;
        A(k, k) = std::sqrt(d);
        for (int i = k + 1; i < n; ++i) {
            double s = A(i, k);
            for (int j = 0; j < k; ++j) s -= A(i, j) * A(k, j);
            A(i, k) = s / A(k, k);
        }
    }
    return true;
}

// Christoffel symbols Gamma^k_ij, symmetric in (i,j).
struct Christoffel {
    int dim = 0;
    std::vector<double> c;  // [k][i][j]

    Christoffel() = default;
    explicit Christoffel(int d) : dim(d), c(static_cast<std::size_t>(d) * d * d, 0.0) {}

    double& operator()(int k, int i, int j) {
        return c[(static_cast<std::size_t>(k) * dim + i) * dim + j];
    }
    double operator()(int k, int i, int j) const {
        return c[(static_cast<std::size_t>(k) * dim + i) * dim + j];
    }

    // Gamma(u, v)^k = Gamma^k_ij u^i v^j
    Vec contract(const Vec& u, const Vec& v) const {
        Vec r(dim, 0.0);
        for (int k = 0; k < dim; ++k) {
            double s = 0;
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) s += (*this)(k, i, j) * u[i] * v[j];
            r[k] = s;
        }
        return r;
    }
};

}  // namespace mjt

#endif
