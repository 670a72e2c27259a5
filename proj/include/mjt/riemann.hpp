#ifndef MJT_RIEMANN_HPP
#define MJT_RIEMANN_HPP

#include <functional>
#include <optional>

#include "mjt/linalg.hpp"
#include "mjt/path.hpp"

namespace mjt {

// Optimal central-difference step for first derivatives of the metric.
inline double default_fd_step() { return 6.055454452393343e-06; }  // eps^(1/3)

struct ChartDomain {
    std::function<bool(const Vec&)> membership;  // empty -> everywhere
    double boundary_margin = 0.0;

    bool contains(const Vec& p) const { return !membership || membership(p); }
};

// A smooth metric over a chart. Christoffel symbols come from a user-supplied
// closed form when available and from central differences of the components
// otherwise.
struct MetricField {
    int dim = 0;
    std::function<Mat(const Vec&)> components;
    std::function<Christoffel(const Vec&)> christoffel_analytic;  // may be empty
    double fd_step = default_fd_step();
    ChartDomain domain;
    bool flat = false;  // constant components in these coordinates

    bool analytic() const { return static_cast<bool>(christoffel_analytic); }
};

MetricField euclidean_metric(int dim);

// Unit round 2-sphere in (theta, phi) coordinates, poles excluded.
MetricField sphere_metric();

// Gamma^k_ij at p. Analytic mode returns the closed form; finite-difference
// mode assembles Gamma from central differences of g with step fd_step.
Christoffel christoffel(const MetricField& metric, const Vec& p);

// h_ij = factor * g_ij. When grad_factor is supplied and the base metric has
// analytic symbols, the result carries the exact conformal Christoffels;
// otherwise the result is finite-difference.
MetricField conformal_transform(const MetricField& metric,
                                std::function<double(const Vec&)> factor,
                                std::function<Vec(const Vec&)> grad_factor = nullptr);

// DV/dparam along the path: componentwise derivative of the field samples
// plus the Gamma(tangent, V) correction. Central differences interior,
// one-sided at the ends. If `derivs` is supplied (analytic dV/dparam on the
// grid) it replaces the finite differencing of the samples.
std::vector<Vec> covariant_derivative_along(const MetricField& metric, const PathSample& path,
                                            const std::vector<Vec>& field,
                                            const std::vector<Vec>* derivs = nullptr);

// Geodesic-deviation curvature term: returns R(u,v)u with the sign convention
// that makes the Jacobi equation read D^2J/ds^2 + R(gamma', J)gamma' = 0 and
// gives R(u,v)u = K v for orthonormal u,v at sectional curvature K.
Vec curvature_term(const MetricField& metric, const Vec& p, const Vec& u, const Vec& v);

// Affinely parametrized geodesic of the metric from (p0, v0). The returned
// grid is the integrator's accepted-step grid. Throws LeftDomainError with
// the partial path if the chart boundary is reached, StepUnderflow if the
// adaptive step collapses.
PathSample integrate_geodesic(const MetricField& metric, const Vec& p0, const Vec& v0,
                              double s0, double s1, double tol);

struct LeftDomainError : Error {
    PathSample partial;
    double exit_param;
    LeftDomainError(PathSample p, double s)
        : Error("geodesic left the chart domain"), partial(std::move(p)), exit_param(s) {}
};

}  // namespace mjt

#endif
