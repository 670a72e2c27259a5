#include "mjt/dynamics.hpp"

#include <cmath>

#include "mjt/ode.hpp"

namespace mjt {

Vec NaturalSystem::grad_U(const Vec& p) const {
    if (grad_potential) return grad_potential(p);
    const int d = metric.dim;
    Vec g(d, 0.0);
    for (int i = 0; i < d; ++i) {
        const double h = metric.fd_step * std::fmax(1.0, std::fabs(p[i]));
        Vec pp = p, pm = p;
        pp[i] += h;
        pm[i] -= h;
        g[i] = (potential(pp) - potential(pm)) / (2 * h);
    }
    return g;
}

Vec newton_rhs(const NaturalSystem& sys, const Vec& p, const Vec& v) {
    if (!sys.metric.domain.contains(p)) throw OutOfDomain("newton_rhs: point outside domain");
    const Christoffel c = christoffel(sys.metric, p);
    const Vec gamma_vv = c.contract(v, v);
    const Vec gU = matvec(inverse(sys.metric.components(p)), sys.grad_U(p));
    Vec a(sys.metric.dim);
    for (int i = 0; i < sys.metric.dim; ++i) a[i] = -gamma_vv[i] - gU[i];
    return a;
}

double energy(const NaturalSystem& sys, const Vec& p, const Vec& v) {
    if (!sys.metric.domain.contains(p)) throw OutOfDomain("energy: point outside domain");
    return 0.5 * metric_dot(sys.metric.components(p), v, v) + sys.potential(p);
}

PathSample integrate_trajectory(const NaturalSystem& sys, const Vec& p0, const Vec& v0, double t0,
                                double t1, double tol) {
    if (!(tol > 0)) throw Error("integrate_trajectory: tol must be positive");
    const double e0 = energy(sys, p0, v0);
    if (!std::isfinite(e0)) throw Error("integrate_trajectory: initial energy not finite");
    const int d = sys.metric.dim;
    Vec y0(2 * d);
    for (int i = 0; i < d; ++i) {
        y0[i] = p0[i];
        y0[d + i] = v0[i];
    }
    auto rhs = [&sys, d](double, const Vec& y) {
        Vec p(y.begin(), y.begin() + d);
        Vec v(y.begin() + d, y.end());
        const Vec a = newton_rhs(sys, p, v);
        Vec dy(2 * d);
        for (int i = 0; i < d; ++i) {
            dy[i] = v[i];
            dy[d + i] = a[i];
        }
        return dy;
    };
    OdeOptions opts;
    opts.accept = [&sys, d](const Vec& y) {
        Vec p(y.begin(), y.begin() + d);
        return sys.metric.domain.contains(p);
    };
    const OdeResult r = integrate_rk45(rhs, y0, t0, t1, tol, opts);

    PathSample path;
    path.kind = ParamKind::time_t;
    path.grid = r.t;
    double drift = 0;
    for (const Vec& y : r.y) {
        Vec p(y.begin(), y.begin() + d);
        Vec v(y.begin() + d, y.end());
        const double e = energy(sys, p, v);
        drift = std::fmax(drift, std::fabs(e - e0));
        path.energies.push_back(e);
        path.points.push_back(std::move(p));
        path.tangents.push_back(std::move(v));
    }
    path.energy_drift = drift;
    if (r.status == OdeStatus::left_domain) throw LeftDomainError(std::move(path), r.exit_param);
    if (r.status == OdeStatus::step_underflow)
        throw StepUnderflow("integrate_trajectory: adaptive step collapsed");
    return path;
}

MetricField jacobi_metric(const NaturalSystem& sys) {
    const double i1 = sys.energy_constant;
    const auto U = sys.potential;
    auto factor = [U, i1](const Vec& p) { return 2.0 * (i1 - U(p)); };
    std::function<Vec(const Vec&)> grad_factor;
    if (sys.grad_potential) {
        const auto gU = sys.grad_potential;
        grad_factor = [gU](const Vec& p) { return -2.0 * gU(p); };
    }
    MetricField h = conformal_transform(sys.metric, factor, grad_factor);
    const double floor = sys.degeneracy_floor;
    const ChartDomain base = sys.metric.domain;
    h.domain.membership = [U, i1, floor, base](const Vec& p) {
        return base.contains(p) && 2.0 * (i1 - U(p)) > floor;
    };
    return h;
}

namespace {

// Conformal factor f = 2(i1 - U) and its parameter derivative along a path.
void factor_series(const NaturalSystem& sys, const PathSample& path, std::vector<double>& f,
                   std::vector<double>& df) {
    const std::size_t n = path.size();
    f.resize(n);
    df.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = 2.0 * (sys.energy_constant - sys.potential(path.points[i]));
        df[i] = -2.0 * dot(sys.grad_U(path.points[i]), path.tangents[i]);
    }
}

}  // namespace

PathSample time_to_arclength(const NaturalSystem& sys, const PathSample& path) {
    path.check_consistent();
    if (path.kind != ParamKind::time_t)
        throw GridMismatch("time_to_arclength: input must be time-parametrized");
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (!path.energies.empty() &&
            std::fabs(path.energies[i] - sys.energy_constant) > sys.drift_bound)
            throw EnergyMismatch("time_to_arclength: sample energy differs from i1");
    }
    std::vector<double> f, df;
    factor_series(sys, path, f, df);
    double scale = 0;
    for (double v : f) scale = std::fmax(scale, v);
    for (double v : f)
        if (v < sys.degeneracy_floor * scale)
            throw DegenerateFactor("time_to_arclength: Jacobi factor below floor along path");

    HermiteSeries hs{path.grid, f, df};
    std::vector<double> s = hs.cumulative();

    PathSample out;
    out.kind = ParamKind::jacobi_arclength_s;
    out.grid = std::move(s);
    out.points = path.points;
    out.energies = path.energies;
    out.energy_drift = path.energy_drift;
    out.tangents.resize(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) out.tangents[i] = (1.0 / f[i]) * path.tangents[i];
    return out;
}

PathSample arclength_to_time(const NaturalSystem& sys, const PathSample& path) {
    path.check_consistent();
    if (path.kind != ParamKind::jacobi_arclength_s)
        throw GridMismatch("arclength_to_time: input must be arclength-parametrized");
    const std::size_t n = path.size();
    std::vector<double> invf(n), dinvf(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = 2.0 * (sys.energy_constant - sys.potential(path.points[i]));
        if (f <= 0) throw DegenerateFactor("arclength_to_time: Jacobi factor not positive");
        // d(1/f)/ds = -f'/f^2 with f' = dF/ds = -2 <grad U, dq/ds>
        const double dfds = -2.0 * dot(sys.grad_U(path.points[i]), path.tangents[i]);
        invf[i] = 1.0 / f;
        dinvf[i] = -dfds / (f * f);
    }
    HermiteSeries hs{path.grid, invf, dinvf};
    std::vector<double> t = hs.cumulative();

    PathSample out;
    out.kind = ParamKind::time_t;
    out.grid = std::move(t);
    out.points = path.points;
    out.energies = path.energies;
    out.energy_drift = path.energy_drift;
    out.tangents.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.tangents[i] = (1.0 / invf[i]) * path.tangents[i];
    return out;
}

double newton_residual(const NaturalSystem& sys, const PathSample& path) {
    path.check_consistent();
    if (path.size() < 7) throw GridMismatch("newton_residual: path too short");
    // D(v)/dt from tangent samples, compared against -grad U (index raised).
    const std::vector<Vec> Dv = covariant_derivative_along(sys.metric, path, path.tangents);
    double worst = 0;
    for (std::size_t i = 2; i + 2 < path.size(); ++i) {
        const Mat g = sys.metric.components(path.points[i]);
        const Vec gU = matvec(inverse(g), sys.grad_U(path.points[i]));
        Vec r = Dv[i];
        for (int c = 0; c < path.dim(); ++c) r[c] += gU[c];
        worst = std::fmax(worst, metric_norm(g, r));
    }
    return worst;
}

}  // namespace mjt
