#ifndef MJT_GARNIER_HPP
#define MJT_GARNIER_HPP

#include <array>
#include <utility>
#include <vector>

#include "mjt/dynamics.hpp"

namespace mjt {

// The N=2 Garnier system in the separatrix sector i1 = i2 = 0, anisotropy
// sigma on the q2 axis, 0 < sigma < 1. The working chart is the closed
// parallelogram 0 <= mu1 < sb2 < mu2 < 1 in Jacobi elliptic coordinates.
struct GarnierModel {
    double sigma;

    explicit GarnierModel(double s);

    double sb2() const { return 1.0 - sigma * sigma; }      // sigma-bar^2
    double sb() const;                                       // sigma-bar

    // Potential with the sign that turns the printed equations of motion into
    // D(qdot)/dt = -grad U: U(q) = -[ (q.q-1)^2/2 + sigma^2 q2^2/2 ].
    double potential(const Vec& q) const;
    Vec grad_potential(const Vec& q) const;
    Mat hess_potential(const Vec& q) const;

    // L = |qdot|^2/2 + (q.q-1)^2/2 + sigma^2 q2^2/2 (the printed Lagrangian).
    double action_lagrangian(const Vec& q, const Vec& qdot) const;

    // Full natural system on (R^2, delta) with i1 = 0.
    NaturalSystem natural_system() const;

    // Half arc length of a separatrix loop: 2/3 + sigma(1 - sigma^2/3).
    double half_length() const;
};

struct BranchSigns {
    int alpha1 = 0;  // 0 or 1
    int alpha2 = 0;
    int s1() const { return alpha1 ? -1 : 1; }  // sign(pi_1) = (-1)^alpha1
    int s2() const { return alpha2 ? -1 : 1; }
};

enum class Branch { edge_q2zero, edge_ellipse };

using EllipticPoint = std::array<double, 2>;  // (mu1, mu2)

// Charts ---------------------------------------------------------------

EllipticPoint cartesian_to_elliptic(const GarnierModel& m, const Vec& q);
// Signs select the Cartesian quadrant; the chart itself is quadrant-folded.
Vec elliptic_to_cartesian(const GarnierModel& m, const EllipticPoint& mu, int sign_q1 = 1,
                          int sign_q2 = 1);

// Closed-form geometry --------------------------------------------------

Mat elliptic_metric(const GarnierModel& m, const EllipticPoint& mu);
Christoffel elliptic_christoffels(const GarnierModel& m, const EllipticPoint& mu);
MetricField elliptic_metric_field(const GarnierModel& m);

// Conformal factor of the Jacobi metric, (-(mu1^3 - sb2 mu1^2) + (mu2^3 - sb2 mu2^2))/(mu2 - mu1).
double jacobi_conformal_factor(const GarnierModel& m, const EllipticPoint& mu);
Mat jacobi_metric_elliptic(const GarnierModel& m, const EllipticPoint& mu);

// Separatrix relations ---------------------------------------------------

// Log residual of the orbit equation: log LHS of the separated orbit product
// minus 2 sigma sb2 a; zero on points of orbit a.
double orbit_residual(const GarnierModel& m, const EllipticPoint& mu, double a,
                      const BranchSigns& signs);

// Log residual of the temporal relation
//   |f(mu1)|^{s1} |f(mu2)|^{s2} = e^{2 sigma (t+t0)},  f(mu) = (w-sigma)/(w+sigma),
// w = sqrt(1-mu). On the q2=0 edge (mu2 = sb2) the mu2 factor degenerates and
// the on-edge limit law |(w1-1)/(w1+1)|^{s1} = e^{2(t+t0)} is used instead.
double time_residual(const GarnierModel& m, const EllipticPoint& mu, double t, double t0,
                     const BranchSigns& signs);

// s + s0 = -(-1)^{alpha1} (mu1+2)/3 sqrt(1-mu1) - (-1)^{alpha2} (mu2+2)/3 sqrt(1-mu2).
double arclength_relation(const GarnierModel& m, const EllipticPoint& mu, const BranchSigns& signs);

// Singular solutions ------------------------------------------------------

// edge_q2zero: q(t) = (tanh(t - t0), 0); edge_ellipse: q(t) = (tanh(sigma t'),
// sb sech(sigma t')) with t' = t - t0.
Vec singular_solution_time(const GarnierModel& m, Branch branch, double t, double t0 = 0.0);

// Arc-length closed forms from the cubic q - q^3/3 = s (theta branch in (0,pi)).
Vec singular_geodesic_arclength(const GarnierModel& m, Branch branch, double s);

// General separatrix geodesics ---------------------------------------------

// One solved sample of the orbit-a geodesic at arc length s (s0 = 0, focus at
// s = 0, loop from D at s = -half_length to D at +half_length).
struct SeparatrixPoint {
    EllipticPoint mu;
    Vec q;            // Cartesian unfolding with q(D) = (1,0), upper half first
    Vec dmu_ds;
    Vec dq_ds;
    BranchSigns signs;
};

SeparatrixPoint separatrix_point(const GarnierModel& m, double a, double s);

// PathSample in the elliptic chart on the given s grid (damped Newton with
// branch continuation; throws OutOfRange for |s| too close to half_length).
PathSample solve_separatrix_geodesic(const GarnierModel& m, double a,
                                     const std::vector<double>& s_grid);

// Cartesian companion of solve_separatrix_geodesic (same grid and convention).
PathSample solve_separatrix_geodesic_cartesian(const GarnierModel& m, double a,
                                               const std::vector<double>& s_grid);

// Jacobi field ---------------------------------------------------------------

// Orthogonal Jacobi field d(mu)/da of the separatrix family, closed form.
Vec explicit_jacobi_field(const GarnierModel& m, const EllipticPoint& mu, const BranchSigns& signs);

// Stackel Hamiltonian ---------------------------------------------------------

double stackel_hamiltonian(const GarnierModel& m, const EllipticPoint& mu,
                           const std::array<double, 2>& pi);

}  // namespace mjt

#endif
