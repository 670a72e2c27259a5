#include "mjt/riemann.hpp"

#include <cmath>

#include "mjt/ode.hpp"

namespace mjt {

MetricField euclidean_metric(int dim) {
    MetricField m;
    m.dim = dim;
    m.components = [dim](const Vec&) { return Mat::identity(dim); };
    m.christoffel_analytic = [dim](const Vec&) { return Christoffel(dim); };
    m.flat = true;
    return m;
}

MetricField sphere_metric() {
    MetricField m;
    m.dim = 2;
    m.components = [](const Vec& p) {
        Mat g(2, 2);
        g(0, 0) = 1.0;
        const double st = std::sin(p[0]);
        g(1, 1) = st * st;
        return g;
    };
    m.christoffel_analytic = [](const Vec& p) {
        Christoffel c(2);
        const double st = std::sin(p[0]), ct = std::cos(p[0]);
        c(0, 1, 1) = -st * ct;
        c(1, 0, 1) = c(1, 1, 0) = ct / st;
        return c;
    };
    m.domain.membership = [](const Vec& p) { return p[0] > 1e-6 && p[0] < M_PI - 1e-6; };
    return m;
}

namespace {

double fd_scale(double h, double coord) { return h * std::fmax(1.0, std::fabs(coord)); }

// d g_ij / d x^l: central differences at steps h and h/2 combined by one
// Richardson pass, which keeps the truncation term below the rounding floor
// for the rational metrics in scope.
std::vector<Mat> metric_partials(const MetricField& metric, const Vec& p) {
    const int d = metric.dim;
    auto central = [&](int l, double h) {
        Vec pp = p, pm = p;
        pp[l] += h;
        pm[l] -= h;
        const Mat gp = metric.components(pp);
        const Mat gm = metric.components(pm);
        Mat r(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) r(i, j) = (gp(i, j) - gm(i, j)) / (2 * h);
        return r;
    };
    std::vector<Mat> dg(d);
    for (int l = 0; l < d; ++l) {
        const double h = fd_scale(metric.fd_step, p[l]);
        const Mat d1 = central(l, h);
        const Mat d2 = central(l, 0.5 * h);
        Mat r(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) r(i, j) = (4.0 * d2(i, j) - d1(i, j)) / 3.0;
        dg[l] = r;
    }
    return dg;
}

Christoffel christoffel_fd(const MetricField& metric, const Vec& p) {
    const int d = metric.dim;
    const Mat g = metric.components(p);
    const Mat ginv = inverse(g);
    const std::vector<Mat> dg = metric_partials(metric, p);
    Christoffel c(d);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                double s = 0;
                for (int l = 0; l < d; ++l)
                    s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                c(k, i, j) = 0.5 * s;
                c(k, j, i) = c(k, i, j);
            }
    return c;
}

}  // namespace

Christoffel christoffel(const MetricField& metric, const Vec& p) {
    if (!metric.domain.contains(p)) throw OutOfDomain("christoffel: point outside chart");
    const Mat g = metric.components(p);
    double det = 0;
    if (metric.dim == 2)
        det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
    else
        det = 1;  // rely on the Cholesky check below for dim > 2
    if (metric.dim == 2 && std::fabs(det) < 1e-14)
        throw DegenerateMetric("christoffel: metric determinant below tolerance");
    if (!is_positive_definite(g)) throw DegenerateMetric("christoffel: metric not positive definite");
    if (metric.analytic()) return metric.christoffel_analytic(p);
    return christoffel_fd(metric, p);
}

MetricField conformal_transform(const MetricField& metric, std::function<double(const Vec&)> factor,
                                std::function<Vec(const Vec&)> grad_factor) {
    MetricField h;
    h.dim = metric.dim;
    h.fd_step = metric.fd_step;
    h.domain = metric.domain;
    const auto base_components = metric.components;
    h.components = [base_components, factor](const Vec& p) {
        const double f = factor(p);
        if (!(f > 0)) throw NonPositiveFactor("conformal factor not positive at requested point");
        return f * base_components(p);
    };
    if (grad_factor && metric.analytic()) {
        // Gamma^k_ij(h) = Gamma^k_ij(g) + (delta^k_i d_j + delta^k_j d_i - g_ij g^kl d_l)/2,
        // d = grad(ln factor).
        const auto base_christoffel = metric.christoffel_analytic;
        const int dim = metric.dim;
        h.christoffel_analytic = [base_components, base_christoffel, factor, grad_factor,
                                  dim](const Vec& p) {
            const double f = factor(p);
            if (!(f > 0)) throw NonPositiveFactor("conformal factor not positive at requested point");
            Vec d = grad_factor(p);
            for (auto& x : d) x /= f;
            const Mat g = base_components(p);
            const Mat ginv = inverse(g);
            const Vec dup = matvec(ginv, d);  // g^kl d_l
            Christoffel c = base_christoffel(p);
            for (int k = 0; k < dim; ++k)
                for (int i = 0; i < dim; ++i)
                    for (int j = 0; j < dim; ++j) {
                        double corr = 0;
                        if (k == i) corr += d[j];
                        if (k == j) corr += d[i];
                        corr -= g(i, j) * dup[k];
                        c(k, i, j) += 0.5 * corr;
                    }
            return c;
        };
    }
    return h;
}

std::vector<Vec> covariant_derivative_along(const MetricField& metric, const PathSample& path,
                                            const std::vector<Vec>& field,
                                            const std::vector<Vec>* derivs) {
    path.check_consistent();
    if (field.size() != path.size())
        throw GridMismatch("covariant_derivative_along: field grid differs from path grid");
    const std::size_t n = path.size();
    const int d = path.dim();
    std::vector<Vec> dV(n, Vec(d, 0.0));
    if (derivs) {
        if (derivs->size() != n) throw GridMismatch("covariant_derivative_along: derivs mismatch");
        dV = *derivs;
    } else {
        // central differences on a possibly nonuniform grid, one-sided at ends
        for (std::size_t i = 0; i < n; ++i) {
            if (i == 0) {
                const double h = path.grid[1] - path.grid[0];
                for (int c = 0; c < d; ++c) dV[i][c] = (field[1][c] - field[0][c]) / h;
            } else if (i + 1 == n) {
                const double h = path.grid[n - 1] - path.grid[n - 2];
                for (int c = 0; c < d; ++c) dV[i][c] = (field[n - 1][c] - field[n - 2][c]) / h;
            } else {
                const double hm = path.grid[i] - path.grid[i - 1];
                const double hp = path.grid[i + 1] - path.grid[i];
                for (int c = 0; c < d; ++c) {
                    // 2nd-order nonuniform central difference
                    dV[i][c] = (hm * hm * field[i + 1][c] - hp * hp * field[i - 1][c] +
                                (hp * hp - hm * hm) * field[i][c]) /
                               (hm * hp * (hm + hp));
                }
            }
        }
    }
    std::vector<Vec> out(n, Vec(d, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const Christoffel c = christoffel(metric, path.points[i]);
        const Vec corr = c.contract(path.tangents[i], field[i]);
        for (int k = 0; k < d; ++k) out[i][k] = dV[i][k] + corr[k];
    }
    return out;
}

Vec curvature_term(const MetricField& metric, const Vec& p, const Vec& u, const Vec& v) {
    if (!metric.domain.contains(p)) throw OutOfDomain("curvature_term: point outside chart");
    const int d = metric.dim;
    const Christoffel G = christoffel(metric, p);
    // dGamma^k_ij / dx^l ; step is fd_step for analytic symbols and
    // sqrt(fd_step)-scaled when the symbols themselves are differenced.
    const double hstep = metric.analytic() ? metric.fd_step : std::sqrt(metric.fd_step);
    std::vector<Christoffel> dG(d);
    for (int l = 0; l < d; ++l) {
        const double h = fd_scale(hstep, p[l]);
        Vec pp = p, pm = p;
        pp[l] += h;
        pm[l] -= h;
        const Christoffel gp = christoffel(metric, pp);
        const Christoffel gm = christoffel(metric, pm);
        Christoffel r(d);
        for (std::size_t idx = 0; idx < r.c.size(); ++idx) r.c[idx] = (gp.c[idx] - gm.c[idx]) / (2 * h);
        dG[l] = r;
    }
    // Standard tensor R^k_{lij} = d_i G^k_{jl} - d_j G^k_{il} + G^k_{im}G^m_{jl} - G^k_{jm}G^m_{il};
    // the deviation term is R_std(v, u)u, i.e. contract with X=v, Y=u, Z=u.
    Vec out(d, 0.0);
    for (int k = 0; k < d; ++k) {
        double s = 0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int l = 0; l < d; ++l) {
                    double R = dG[i](k, j, l) - dG[j](k, i, l);
                    for (int m = 0; m < d; ++m)
                        R += G(k, i, m) * G(m, j, l) - G(k, j, m) * G(m, i, l);
                    s += R * v[i] * u[j] * u[l];
                }
        out[k] = s;
    }
    return out;
}

PathSample integrate_geodesic(const MetricField& metric, const Vec& p0, const Vec& v0, double s0,
                              double s1, double tol) {
    if (!metric.domain.contains(p0)) throw OutOfDomain("integrate_geodesic: start outside chart");
    if (!(tol > 0)) throw Error("integrate_geodesic: tol must be positive");
    const int d = metric.dim;
    Vec y0(2 * d);
    for (int i = 0; i < d; ++i) {
        y0[i] = p0[i];
        y0[d + i] = v0[i];
    }
    auto rhs = [&metric, d](double, const Vec& y) {
        Vec p(y.begin(), y.begin() + d);
        Vec v(y.begin() + d, y.end());
        const Christoffel c = christoffel(metric, p);
        const Vec acc = c.contract(v, v);
        Vec dy(2 * d);
        for (int i = 0; i < d; ++i) {
            dy[i] = v[i];
            dy[d + i] = -acc[i];
        }
        return dy;
    };
    OdeOptions opts;
    opts.accept = [&metric, d](const Vec& y) {
        Vec p(y.begin(), y.begin() + d);
        return metric.domain.contains(p);
    };
    const OdeResult r = integrate_rk45(rhs, y0, s0, s1, tol, opts);

    PathSample path;
    path.kind = ParamKind::jacobi_arclength_s;
    path.grid = r.t;
    path.points.reserve(r.y.size());
    path.tangents.reserve(r.y.size());
    path.energies.reserve(r.y.size());
    for (const Vec& y : r.y) {
        Vec p(y.begin(), y.begin() + d);
        Vec v(y.begin() + d, y.end());
        path.energies.push_back(0.5 * metric_dot(metric.components(p), v, v));
        path.points.push_back(std::move(p));
        path.tangents.push_back(std::move(v));
    }
    if (r.status == OdeStatus::left_domain) throw LeftDomainError(std::move(path), r.exit_param);
    if (r.status == OdeStatus::step_underflow)
        throw StepUnderflow("integrate_geodesic: adaptive step collapsed");
    return path;
}

}  // namespace mjt
