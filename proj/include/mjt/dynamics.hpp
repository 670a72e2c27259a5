#ifndef MJT_DYNAMICS_HPP
#define MJT_DYNAMICS_HPP

#include <functional>

#include "mjt/riemann.hpp"

namespace mjt {

// A natural mechanical system: kinetic metric plus potential. The Jacobi
// metric h = 2(i1 - U) g ties the Newton flow to geodesics of h.
struct NaturalSystem {
    MetricField metric;
    std::function<double(const Vec&)> potential;
    std::function<Vec(const Vec&)> grad_potential;        // empty -> finite differences
    std::function<Mat(const Vec&)> hess_potential;        // optional closed-form Hessian
    double energy_constant = 0.0;                         // i1
    double degeneracy_floor = 1e-6;                       // relative floor for i1 - U
    double drift_bound = 1e-6;                            // admissible |energy - i1| on paths

    Vec grad_U(const Vec& p) const;
};

// Coordinate acceleration of D(gamma-dot)/dt = -grad U:
// a^k = -Gamma^k_ij v^i v^j - (grad U)^k (index raised with g).
Vec newton_rhs(const NaturalSystem& sys, const Vec& p, const Vec& v);

double energy(const NaturalSystem& sys, const Vec& p, const Vec& v);

// Adaptive integration of the Newton flow; records per-sample energies and
// the maximal drift from the initial energy.
PathSample integrate_trajectory(const NaturalSystem& sys, const Vec& p0, const Vec& v0, double t0,
                                double t1, double tol);

// The conformal metric 2(i1 - U) g with exact Christoffels when the base
// metric and grad U allow it. Its chart excludes the degeneracy set U >= i1.
MetricField jacobi_metric(const NaturalSystem& sys);

// Reparametrize a Newton solution by Jacobi arc length, ds/dt = 2(i1 - U):
// same curve, tangents rescaled by dt/ds, parameter_kind flipped. The factor
// convention makes the reparametrized curve unit-speed in the Jacobi metric.
PathSample time_to_arclength(const NaturalSystem& sys, const PathSample& path);

// Inverse map; a round trip reproduces grids within quadrature tolerance.
PathSample arclength_to_time(const NaturalSystem& sys, const PathSample& path);

// Max norm of the Newton-equation residual D(gamma-dot)/dt + grad U over the
// interior samples, using tangent differencing; used as the extremal check.
double newton_residual(const NaturalSystem& sys, const PathSample& path);

}  // namespace mjt

#endif
