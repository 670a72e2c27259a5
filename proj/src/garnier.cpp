#include "mjt/garnier.hpp"

#include <algorithm>
#include <cmath>

#include "mjt/interp.hpp"

namespace mjt {

namespace {

constexpr double kBoundaryFloor = 1e-12;

// The separated log factors, as functions of w = sqrt(1 - mu).
double logA(double w, double sigma) { return std::log(std::fabs((w - sigma) / (w + sigma))); }
double logC(double w) { return std::log(std::fabs((1.0 + w) / (1.0 - w))); }
double orbit_bracket(double w, double sigma) { return logA(w, sigma) + sigma * logC(w); }
double cubic(double w) { return w - w * w * w / 3.0; }

}  // namespace

GarnierModel::GarnierModel(double s) : sigma(s) {
    if (!(s > 0.0 && s < 1.0))
        throw ConfigError("GarnierModel: sigma must lie strictly between 0 and 1");
}

double GarnierModel::sb() const { return std::sqrt(sb2()); }

double GarnierModel::potential(const Vec& q) const {
    const double r = q[0] * q[0] + q[1] * q[1] - 1.0;
    return -(0.5 * r * r + 0.5 * sigma * sigma * q[1] * q[1]);
}

Vec GarnierModel::grad_potential(const Vec& q) const {
    const double r = q[0] * q[0] + q[1] * q[1] - 1.0;
    return {-2.0 * q[0] * r, -2.0 * q[1] * r - sigma * sigma * q[1]};
}

Mat GarnierModel::hess_potential(const Vec& q) const {
    const double r = q[0] * q[0] + q[1] * q[1] - 1.0;
    Mat H(2, 2);
    H(0, 0) = -(2.0 * r + 4.0 * q[0] * q[0]);
    H(0, 1) = H(1, 0) = -4.0 * q[0] * q[1];
    H(1, 1) = -(2.0 * r + 4.0 * q[1] * q[1] + sigma * sigma);
    return H;
}

double GarnierModel::action_lagrangian(const Vec& q, const Vec& qdot) const {
    const double r = q[0] * q[0] + q[1] * q[1] - 1.0;
    return 0.5 * (qdot[0] * qdot[0] + qdot[1] * qdot[1]) + 0.5 * r * r +
           0.5 * sigma * sigma * q[1] * q[1];
}

NaturalSystem GarnierModel::natural_system() const {
    NaturalSystem sys;
    sys.metric = euclidean_metric(2);
    const GarnierModel m = *this;
    sys.potential = [m](const Vec& q) { return m.potential(q); };
    sys.grad_potential = [m](const Vec& q) { return m.grad_potential(q); };
    sys.hess_potential = [m](const Vec& q) { return m.hess_potential(q); };
    sys.energy_constant = 0.0;
    return sys;
}

double GarnierModel::half_length() const {
    return 2.0 / 3.0 + sigma * (1.0 - sigma * sigma / 3.0);
}

// Charts ----------------------------------------------------------------

EllipticPoint cartesian_to_elliptic(const GarnierModel& m, const Vec& q) {
    const double sb2 = m.sb2();
    const double q1s = q[0] * q[0], q2s = q[1] * q[1];
    if (q1s + q2s / sb2 > 1.0 + 1e-12)
        throw OutsideChart("cartesian_to_elliptic: point outside the bounding ellipse");
    const double S = (1.0 + sb2) - (q1s + q2s);
    const double P = sb2 * (1.0 - q1s) - q2s;
    const double disc = std::fmax(S * S - 4.0 * P, 0.0);
    const double r = std::sqrt(disc);
    EllipticPoint mu{0.5 * (S - r), 0.5 * (S + r)};
    mu[0] = std::clamp(mu[0], 0.0, sb2);
    mu[1] = std::clamp(mu[1], sb2, 1.0);
    return mu;
}

Vec elliptic_to_cartesian(const GarnierModel& m, const EllipticPoint& mu, int sign_q1,
                          int sign_q2) {
    const double sb2 = m.sb2();
    const double a1 = (1.0 - mu[0]) * (1.0 - mu[1]);
    const double a2 = (sb2 - mu[0]) * (mu[1] - sb2);
    if (a1 < -1e-12 || a2 < -1e-12)
        throw OutsideChart("elliptic_to_cartesian: point outside the parallelogram");
    return {sign_q1 * std::sqrt(std::fmax(a1, 0.0)) / m.sigma,
            sign_q2 * std::sqrt(std::fmax(a2, 0.0)) / m.sigma};
}

// Closed-form geometry ----------------------------------------------------

Mat elliptic_metric(const GarnierModel& m, const EllipticPoint& mu) {
    const double sb2 = m.sb2();
    const double d1 = (mu[0] - 1.0) * (mu[0] - sb2);
    const double d2 = (mu[1] - 1.0) * (mu[1] - sb2);
    if (std::fabs(d1) < kBoundaryFloor || std::fabs(d2) < kBoundaryFloor ||
        std::fabs(mu[0] - mu[1]) < kBoundaryFloor)
        throw ChartBoundary("elliptic_metric: degenerate at the parallelogram boundary");
    Mat g(2, 2);
    g(0, 0) = -(mu[0] - mu[1]) / (4.0 * d1);
    g(1, 1) = -(mu[1] - mu[0]) / (4.0 * d2);
    return g;
}

Christoffel elliptic_christoffels(const GarnierModel& m, const EllipticPoint& mu) {
    const double sb2 = m.sb2();
    const double m1 = mu[0], m2 = mu[1];
    const double d1 = (m1 - 1.0) * (m1 - sb2);
    const double d2 = (m2 - 1.0) * (m2 - sb2);
    if (std::fabs(d1) < kBoundaryFloor || std::fabs(d2) < kBoundaryFloor ||
        std::fabs(m1 - m2) < kBoundaryFloor)
        throw ChartBoundary("elliptic_christoffels: degenerate at the parallelogram boundary");
    Christoffel c(2);
    // printed closed forms; the second row follows by the index swap 1 <-> 2
    c(0, 0, 0) = 1.0 / (2.0 * (m1 - m2)) - (2.0 * m1 - (1.0 + sb2)) / (2.0 * d1);
    c(0, 0, 1) = c(0, 1, 0) = -1.0 / (2.0 * (m1 - m2));
    c(0, 1, 1) = d1 / (2.0 * d2 * (m1 - m2));
    c(1, 1, 1) = 1.0 / (2.0 * (m2 - m1)) - (2.0 * m2 - (1.0 + sb2)) / (2.0 * d2);
    c(1, 0, 1) = c(1, 1, 0) = -1.0 / (2.0 * (m2 - m1));
    c(1, 0, 0) = d2 / (2.0 * d1 * (m2 - m1));
    return c;
}

MetricField elliptic_metric_field(const GarnierModel& m) {
    MetricField g;
    g.dim = 2;
    const GarnierModel model = m;
    g.components = [model](const Vec& p) {
        return elliptic_metric(model, {p[0], p[1]});
    };
    g.christoffel_analytic = [model](const Vec& p) {
        return elliptic_christoffels(model, {p[0], p[1]});
    };
    const double sb2 = m.sb2();
    g.domain.membership = [sb2](const Vec& p) {
        return p[0] > 0.0 && p[0] < sb2 && p[1] > sb2 && p[1] < 1.0;
    };
    return g;
}

double jacobi_conformal_factor(const GarnierModel& m, const EllipticPoint& mu) {
    const double sb2 = m.sb2();
    const double m1 = mu[0], m2 = mu[1];
    if (std::fabs(m1 - m2) < kBoundaryFloor)
        throw ChartBoundary("jacobi_conformal_factor: mu1 = mu2");
    return (-(m1 * m1 * m1 - sb2 * m1 * m1) + (m2 * m2 * m2 - sb2 * m2 * m2)) / (m2 - m1);
}

Mat jacobi_metric_elliptic(const GarnierModel& m, const EllipticPoint& mu) {
    const double f = jacobi_conformal_factor(m, mu);
    if (f < m.sigma * m.sigma * 1e-10)
        throw DegenerateFactor("jacobi_metric_elliptic: conformal factor vanishes near the vacua");
    return f * elliptic_metric(m, mu);
}

// Separatrix relations ------------------------------------------------------

namespace {

void check_w_regular(double w, double sigma, const char* who) {
    if (std::fabs(w - sigma) < 1e-9 || std::fabs(w - 1.0) < 1e-9)
        throw SingularFactor(std::string(who) + ": sqrt(1-mu) at a singular value");
}

}  // namespace

double orbit_residual(const GarnierModel& m, const EllipticPoint& mu, double a,
                      const BranchSigns& signs) {
    const double w1 = std::sqrt(1.0 - mu[0]);
    const double w2 = std::sqrt(1.0 - mu[1]);
    check_w_regular(w1, m.sigma, "orbit_residual");
    check_w_regular(w2, m.sigma, "orbit_residual");
    return signs.s1() * orbit_bracket(w1, m.sigma) + signs.s2() * orbit_bracket(w2, m.sigma) -
           2.0 * m.sigma * m.sb2() * a;
}

double time_residual(const GarnierModel& m, const EllipticPoint& mu, double t, double t0,
                     const BranchSigns& signs) {
    const double w1 = std::sqrt(1.0 - mu[0]);
    const double w2 = std::sqrt(1.0 - mu[1]);
    if (std::fabs(w2 - m.sigma) < 1e-9) {
        // q2 = 0 edge: the mu2 factor degenerates; the limiting law is the
        // arctanh relation of the edge solution itself.
        if (std::fabs(w1 - 1.0) < 1e-9)
            throw SingularFactor("time_residual: both factors degenerate");
        return signs.s1() * std::log(std::fabs((w1 - 1.0) / (w1 + 1.0))) - 2.0 * (t + t0);
    }
    check_w_regular(w1, m.sigma, "time_residual");
    if (std::fabs(w2 - 1.0) < 1e-9) throw SingularFactor("time_residual: sqrt(1-mu2) at 1");
    return signs.s1() * logA(w1, m.sigma) + signs.s2() * logA(w2, m.sigma) -
           2.0 * m.sigma * (t + t0);
}

double arclength_relation(const GarnierModel& m, const EllipticPoint& mu,
                          const BranchSigns& signs) {
    const double w1 = std::sqrt(std::fmax(1.0 - mu[0], 0.0));
    const double w2 = std::sqrt(std::fmax(1.0 - mu[1], 0.0));
    (void)m;
    return -signs.s1() * ((mu[0] + 2.0) / 3.0) * w1 - signs.s2() * ((mu[1] + 2.0) / 3.0) * w2;
}

// Singular solutions ---------------------------------------------------------

Vec singular_solution_time(const GarnierModel& m, Branch branch, double t, double t0) {
    const double tau = t - t0;
    if (branch == Branch::edge_q2zero) return {std::tanh(tau), 0.0};
    const double st = m.sigma * tau;
    return {std::tanh(st), m.sb() / std::cosh(st)};
}

namespace {

// Middle root of w - w^3/3 = s for |s| <= 2/3, continuous and odd:
// w(s) = -cos(theta/3) + sqrt(3) sin(theta/3), theta = atan2(sqrt(4-9 s^2), -3 s).
double cubic_middle_root(double s) {
    const double disc = 4.0 - 9.0 * s * s;
    const double theta = std::atan2(std::sqrt(std::fmax(disc, 0.0)), -3.0 * s);
    return -std::cos(theta / 3.0) + std::sqrt(3.0) * std::sin(theta / 3.0);
}

}  // namespace

Vec singular_geodesic_arclength(const GarnierModel& m, Branch branch, double s) {
    if (branch == Branch::edge_q2zero) {
        if (std::fabs(s) > 2.0 / 3.0 + 1e-12)
            throw OutOfRange("singular_geodesic_arclength: |s| exceeds 2/3");
        return {cubic_middle_root(std::clamp(s, -2.0 / 3.0, 2.0 / 3.0)), 0.0};
    }
    const double smax = m.sigma * (1.0 - m.sigma * m.sigma / 3.0);
    if (std::fabs(s) > smax + 1e-12)
        throw OutOfRange("singular_geodesic_arclength: |s| exceeds sigma(1 - sigma^2/3)");
    // sigma (q - sigma^2 q^3/3) = s  <=>  x - x^3/3 = s with x = sigma q.
    const double x = cubic_middle_root(std::clamp(s, -smax, smax));
    const double q1 = x / m.sigma;
    const double q2sq = m.sb2() * (1.0 - q1 * q1);
    return {q1, m.sb() / m.sigma * std::sqrt(std::fmax(q2sq * m.sigma * m.sigma / m.sb2(), 0.0))};
}

// General separatrix geodesics ------------------------------------------------
//
// A separatrix geodesic at orbit constant a runs from the corner D
// (mu = (0, sb2)) through the focus corner F (mu = (sb2, sb2)) back to D,
// total length 2 * half_length, focus at s = 0 under the s0 = 0 convention.
// In the variables w1 = sqrt(1-mu1) in (sigma, 1) and the signed fold
// variable wh2 (|wh2| = sqrt(1-mu2) in (0, sigma), sign = sign(pi_2)) the two
// halves are monotone graphs:
//   first half  (s < 0):  B(w1) + B(wh2) = alpha,  -P(w1) - P(wh2) = s
//   second half (s > 0): -B(w1) + B(wh2) = alpha,   P(w1) - P(wh2) = s
// with B(w) = log|(w-sigma)/(w+sigma)| + sigma log|(1+w)/(1-w)| extended
// oddly through wh2 = 0 (the mu2 = 1 fold) and P(w) = w - w^3/3.

namespace {

// Odd extension of the bracket through the fold.
double bracket_odd(double w, double sigma) {
    if (w == 0.0) return 0.0;
    const double b = orbit_bracket(std::fabs(w), sigma);
    return w > 0 ? b : -b;
}

// dB/dw; the same expression serves the odd extension (even in w).
double bracket_deriv(double w, double sigma) {
    const double sb2 = 1.0 - sigma * sigma;
    return 2.0 * sigma * sb2 / ((w * w - sigma * sigma) * (1.0 - w * w));
}

struct MemberRoot {
    double w1;
    double wh2;
};

// Robust nested solve: wh2 is the unknown of a strictly monotone scalar
// equation, w1 recovered from the orbit bracket.
MemberRoot member_root_bisect(double sigma, double alpha, double s, bool first_half) {
    const double wlo = sigma + sigma * 1e-14;
    const double whi = 1.0 - 1e-14;
    const double Blo = orbit_bracket(wlo, sigma);
    const double Bhi = orbit_bracket(whi, sigma);
    auto Binv = [&](double x) {
        if (x <= Blo) return wlo;
        if (x >= Bhi) return whi;
        return solve_monotone([&](double w) { return orbit_bracket(w, sigma) - x; }, wlo, whi,
                              1e-16);
    };
    auto w1_of = [&](double wh2) {
        return first_half ? Binv(alpha - bracket_odd(wh2, sigma))
                          : Binv(bracket_odd(wh2, sigma) - alpha);
    };
    auto arc_of = [&](double wh2) {
        const double w1 = w1_of(wh2);
        return first_half ? (-cubic(w1) - cubic(wh2)) : (cubic(w1) - cubic(wh2));
    };
    const double lim = sigma * (1.0 - 1e-13);
    const double wh2 =
        solve_monotone([&](double x) { return arc_of(x) - s; }, -lim, lim, 1e-16);
    return {w1_of(wh2), wh2};
}

// Damped Newton on the 2x2 system, warm-started from a nearby root. Returns
// false when the iteration leaves the admissible box or stalls.
bool member_root_newton(double sigma, double alpha, double s, bool first_half, MemberRoot& r) {
    const int s1 = first_half ? 1 : -1;
    for (int it = 0; it < 50; ++it) {
        const double f1 = s1 * orbit_bracket(r.w1, sigma) + bracket_odd(r.wh2, sigma) - alpha;
        const double f2 = -s1 * cubic(r.w1) - cubic(r.wh2) - s;
        if (std::fabs(f1) < 1e-12 && std::fabs(f2) < 5e-15) return true;
        const double j11 = s1 * bracket_deriv(r.w1, sigma);
        const double j12 = bracket_deriv(r.wh2, sigma);
        const double j21 = -s1 * (1.0 - r.w1 * r.w1);
        const double j22 = -(1.0 - r.wh2 * r.wh2);
        const double det = j11 * j22 - j12 * j21;
        if (!std::isfinite(det) || std::fabs(det) < 1e-300) return false;
        const double dw1 = (-f1 * j22 + f2 * j12) / det;
        const double dwh2 = (-j11 * f2 + j21 * f1) / det;
        double lam = 1.0;
        while (lam > 1e-6) {
            const double n1 = r.w1 + lam * dw1, n2 = r.wh2 + lam * dwh2;
            if (n1 > sigma * (1 + 1e-15) && n1 < 1.0 - 1e-15 && std::fabs(n2) < sigma * (1 - 1e-15))
                break;
            lam *= 0.5;
        }
        if (lam <= 1e-6) return false;
        r.w1 += lam * dw1;
        r.wh2 += lam * dwh2;
    }
    return false;
}

SeparatrixPoint assemble_point(const GarnierModel& m, const MemberRoot& r, bool first_half) {
    const double sig = m.sigma;
    const int s1 = first_half ? 1 : -1;
    const double w1 = r.w1, wh2 = r.wh2;

    SeparatrixPoint out;
    out.mu = {1.0 - w1 * w1, 1.0 - wh2 * wh2};
    out.signs.alpha1 = s1 > 0 ? 0 : 1;
    out.signs.alpha2 = wh2 > 0 ? 0 : 1;

    // Differentiate the two defining relations in s:
    //   s1 B'(w1) w1' + B'(wh2) wh2' = 0,  -s1 P'(w1) w1' - P'(wh2) wh2' = 1.
    const double B1 = bracket_deriv(w1, sig);
    const double B2 = bracket_deriv(wh2, sig);
    const double P1 = 1.0 - w1 * w1;
    const double P2 = 1.0 - wh2 * wh2;
    const double wh2p = 1.0 / (P1 * B2 / B1 - P2);
    const double w1p = -s1 * (B2 / B1) * wh2p;
    out.dmu_ds = {-2.0 * w1 * w1p, -2.0 * wh2 * wh2p};

    // Cartesian unfolding: loop based at D = (1,0), upper half plane on the
    // first half, lower on the second; q1 flips sign at the q2-axis folds.
    const double hs = first_half ? 1.0 : -1.0;
    const double A = w1 * w1 - sig * sig;
    const double Bq = sig * sig - wh2 * wh2;
    const double q1 = hs * w1 * wh2 / sig;
    const double q2 = hs * std::sqrt(std::fmax(A * Bq, 0.0)) / sig;
    out.q = {q1, q2};
    const double dq1 = hs * (w1p * wh2 + w1 * wh2p) / sig;
    // dq2 = d/ds [ hs sqrt(A Bq) / sig ] = hs (A Bq)' / (2 sig sqrt(A Bq))
    const double dAB = 2.0 * w1 * w1p * Bq - 2.0 * wh2 * wh2p * A;
    const double dq2 = (std::fabs(q2) > 1e-14)
                           ? hs * dAB / (2.0 * sig * std::sqrt(std::fmax(A * Bq, 1e-300)))
                           : 0.0;
    out.dq_ds = {dq1, dq2};
    return out;
}

}  // namespace

SeparatrixPoint separatrix_point(const GarnierModel& m, double a, double s) {
    const double L2 = m.half_length();
    if (std::fabs(s) > L2 - 1e-9)
        throw OutOfRange("separatrix_point: s outside the admissible open range");
    const double alpha = 2.0 * m.sigma * m.sb2() * a;

    if (std::fabs(s) < 1e-12) {
        // the focus corner, shared by every member of the family
        SeparatrixPoint out;
        out.mu = {m.sb2(), m.sb2()};
        out.signs = BranchSigns{0, 1};
        out.q = {-m.sigma, 0.0};
        // chart-regular neighbours give the crossing direction
        const double d = 1e-6;
        const SeparatrixPoint pm = separatrix_point(m, a, -d);
        const SeparatrixPoint pp = separatrix_point(m, a, +d);
        out.dmu_ds = {(pp.mu[0] - pm.mu[0]) / (2 * d), (pp.mu[1] - pm.mu[1]) / (2 * d)};
        out.dq_ds = {(pp.q[0] - pm.q[0]) / (2 * d), (pp.q[1] - pm.q[1]) / (2 * d)};
        return out;
    }
    const bool first_half = s < 0;
    const MemberRoot r = member_root_bisect(m.sigma, alpha, s, first_half);
    return assemble_point(m, r, first_half);
}

namespace {

PathSample solve_separatrix_impl(const GarnierModel& m, double a,
                                 const std::vector<double>& s_grid, bool cartesian) {
    if (s_grid.size() < 2) throw GridMismatch("solve_separatrix_geodesic: need at least 2 samples");
    const double L2 = m.half_length();
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        if (std::fabs(s_grid[i]) > L2 - 1e-9)
            throw OutOfRange("solve_separatrix_geodesic: grid sample outside admissible s-range");
        if (i > 0 && !(s_grid[i] > s_grid[i - 1]))
            throw GridMismatch("solve_separatrix_geodesic: s grid not increasing");
    }

    PathSample path;
    path.kind = ParamKind::jacobi_arclength_s;
    path.grid = s_grid;
    path.points.reserve(s_grid.size());
    path.tangents.reserve(s_grid.size());

    const double alpha = 2.0 * m.sigma * m.sb2() * a;
    bool have_prev = false;
    bool prev_half = true;
    MemberRoot prev{0, 0};
    for (double s : s_grid) {
        SeparatrixPoint pt;
        if (std::fabs(s) < 1e-12) {
            pt = separatrix_point(m, a, s);
            have_prev = false;
        } else {
            const bool first_half = s < 0;
            MemberRoot r = prev;
            bool ok = have_prev && prev_half == first_half &&
                      member_root_newton(m.sigma, alpha, s, first_half, r);
            if (!ok) r = member_root_bisect(m.sigma, alpha, s, first_half);
            pt = assemble_point(m, r, first_half);
            prev = r;
            prev_half = first_half;
            have_prev = true;
        }
        path.points.push_back(cartesian ? pt.q : Vec{pt.mu[0], pt.mu[1]});
        path.tangents.push_back(cartesian ? pt.dq_ds : pt.dmu_ds);
        path.energies.push_back(0.0);
    }
    return path;
}

}  // namespace

PathSample solve_separatrix_geodesic(const GarnierModel& m, double a,
                                     const std::vector<double>& s_grid) {
    return solve_separatrix_impl(m, a, s_grid, false);
}

PathSample solve_separatrix_geodesic_cartesian(const GarnierModel& m, double a,
                                               const std::vector<double>& s_grid) {
    return solve_separatrix_impl(m, a, s_grid, true);
}

// Jacobi field -----------------------------------------------------------------

Vec explicit_jacobi_field(const GarnierModel& m, const EllipticPoint& mu,
                          const BranchSigns& signs) {
    const double sb2 = m.sb2();
    const double m1 = mu[0], m2 = mu[1];
    if (std::fabs(m1 - m2) < 1e-12)
        throw DegenerateDiagonal("explicit_jacobi_field: mu1 = mu2");
    const double Q = m1 * m1 + m2 * m2 + m1 * m2 - (m1 + m2) * sb2;
    const double j = 2.0 * m1 * m2 * (m1 - sb2) * (m2 - sb2) / ((m1 - m2) * Q);
    const double w1 = std::sqrt(std::fmax(1.0 - m1, 0.0));
    const double w2 = std::sqrt(std::fmax(1.0 - m2, 0.0));
    // Solves the implicit-derivative system of the orbit and arc-length
    // relations; the relative sign between the components is fixed by that
    // system (and by g-orthogonality to the geodesic).
    return {-signs.s1() * j * m2 * w1, signs.s2() * j * m1 * w2};
}

// Stackel Hamiltonian -------------------------------------------------------------

double stackel_hamiltonian(const GarnierModel& m, const EllipticPoint& mu,
                           const std::array<double, 2>& pi) {
    const double sb2 = m.sb2();
    const double m1 = mu[0], m2 = mu[1];
    if (std::fabs(m1 - m2) < kBoundaryFloor)
        throw ChartBoundary("stackel_hamiltonian: mu1 = mu2");
    const double num = -4.0 * (m1 - 1.0) * (m1 - sb2) * pi[0] * pi[0] -
                       4.0 * (1.0 - m2) * (m2 - sb2) * pi[1] * pi[1] -
                       (m1 * m1 * m1 - sb2 * m1 * m1) + (m2 * m2 * m2 - sb2 * m2 * m2);
    return num / (2.0 * (m1 - m2));
}

}  // namespace mjt
