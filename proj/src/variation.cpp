#include "mjt/variation.hpp"

#include <cmath>
#include <random>

#include "mjt/interp.hpp"

namespace mjt {

namespace {

constexpr int kDefaultQuadNodes = 800;   // intervals; Simpson needs an even count
constexpr double kExtremalTol = 1e-3;
constexpr double kProperTol = 1e-8;

void check_proper(const VariationField& V) {
    double scale = 0;
    for (const Vec& v : V.values) scale = std::fmax(scale, norm(v));
    if (scale == 0) return;  // the zero variation is proper
    if (norm(V.values.front()) > kProperTol * scale || norm(V.values.back()) > kProperTol * scale)
        throw ImproperVariation("variation does not vanish at the endpoints");
}

// Hermite evaluation of a sampled field (values + optional derivs).
struct FieldInterp {
    const std::vector<double>& grid;
    std::vector<Vec> vals;
    std::vector<Vec> ders;

    FieldInterp(const PathSample& path, const VariationField& V) : grid(path.grid), vals(V.values) {
        if (!V.derivs.empty()) {
            ders = V.derivs;
        } else {
            // Catmull-Rom slopes on the (possibly nonuniform) grid
            const std::size_t n = grid.size();
            const int d = static_cast<int>(vals.front().size());
            ders.assign(n, Vec(d, 0.0));
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t il = i == 0 ? 0 : i - 1;
                const std::size_t ir = i + 1 == n ? i : i + 1;
                const double h = grid[ir] - grid[il];
                for (int c = 0; c < d; ++c) ders[i][c] = (vals[ir][c] - vals[il][c]) / h;
            }
        }
    }

    Vec value(double x) const {
        const std::size_t i = locate(grid, x);
        Vec r(vals[i].size());
        for (std::size_t c = 0; c < r.size(); ++c)
            r[c] = hermite(x, grid[i], grid[i + 1], vals[i][c], vals[i + 1][c], ders[i][c],
                           ders[i + 1][c]);
        return r;
    }
    Vec deriv(double x) const {
        const std::size_t i = locate(grid, x);
        Vec r(vals[i].size());
        for (std::size_t c = 0; c < r.size(); ++c)
            r[c] = hermite_deriv(x, grid[i], grid[i + 1], vals[i][c], vals[i + 1][c], ders[i][c],
                                 ders[i + 1][c]);
        return r;
    }
};

// nabla_V grad U (vector field derivative of the raised gradient).
Vec nabla_V_gradU(const NaturalSystem& sys, const Vec& p, const Vec& V) {
    const int d = sys.metric.dim;
    if (sys.hess_potential && sys.metric.flat) {
        const Mat H = sys.hess_potential(p);
        return matvec(H, V);
    }
    // directional finite difference of the raised gradient field
    const double h = sys.metric.fd_step * std::fmax(1.0, norm(p)) / std::fmax(norm(V), 1e-30);
    Vec pp = p, pm = p;
    axpy(h, V, pp);
    axpy(-h, V, pm);
    const Vec Wp = matvec(inverse(sys.metric.components(pp)), sys.grad_U(pp));
    const Vec Wm = matvec(inverse(sys.metric.components(pm)), sys.grad_U(pm));
    Vec r(d);
    for (int c = 0; c < d; ++c) r[c] = (Wp[c] - Wm[c]) / (2 * h);
    const Vec W = matvec(inverse(sys.metric.components(p)), sys.grad_U(p));
    const Christoffel G = christoffel(sys.metric, p);
    const Vec corr = G.contract(V, W);
    for (int c = 0; c < d; ++c) r[c] += corr[c];
    return r;
}

struct QuadContext {
    const MetricField* metric;
    const PathSample* path;
    FieldInterp field;
    double a, b;
};

// Simpson integral of `integrand(x, p, T, V, Vdot)` over the path range,
// evaluated at n and n/2 nodes for the discretization estimate.
template <typename F>
QuadraticFormReport integrate_form(const PathSample& path, const VariationField& V, int n_quad,
                                   F&& integrand) {
    const int n = n_quad > 0 ? (n_quad + (n_quad % 2)) : kDefaultQuadNodes;
    FieldInterp field(path, V);
    const double a = path.grid.front(), b = path.grid.back();
    auto node = [&](double x) {
        const Vec p = path.point_at(x);
        const Vec T = path.tangent_at(x);
        const Vec v = field.value(x);
        const Vec vd = field.deriv(x);
        return integrand(x, p, T, v, vd);
    };
    std::vector<double> f(static_cast<std::size_t>(n) + 1);
    const double h = (b - a) / n;
    for (int i = 0; i <= n; ++i) f[static_cast<std::size_t>(i)] = node(a + i * h);
    const double full = simpson(f, h);
    std::vector<double> half(static_cast<std::size_t>(n / 2) + 1);
    for (int i = 0; i <= n / 2; ++i) half[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>(2 * i)];
    const double coarse = simpson(half, 2 * h);
    return {full, std::fabs(full - coarse)};
}

Vec project_out(const Mat& g, const Vec& T, const Vec& V) {
    const double tt = metric_dot(g, T, T);
    if (tt < 1e-24) throw ZeroTangent("orthogonal projection against a vanishing tangent");
    const double c = metric_dot(g, V, T) / tt;
    Vec r = V;
    axpy(-c, T, r);
    return r;
}

}  // namespace

VariationField random_bump_field(const PathSample& path, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const int d = path.dim();
    const int modes = 3 + static_cast<int>(rng() % 5);
    std::vector<std::vector<double>> coef(static_cast<std::size_t>(d));
    for (int c = 0; c < d; ++c) {
        coef[static_cast<std::size_t>(c)].resize(static_cast<std::size_t>(modes));
        for (int k = 0; k < modes; ++k)
            coef[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)] = unif(rng) / (k + 1);
    }
    const double a = path.grid.front(), b = path.grid.back();
    VariationField V;
    V.values.resize(path.size(), Vec(d, 0.0));
    V.derivs.resize(path.size(), Vec(d, 0.0));
    for (std::size_t i = 0; i < path.size(); ++i) {
        const double tau = (path.grid[i] - a) / (b - a);
        for (int c = 0; c < d; ++c) {
            double v = 0, vd = 0;
            for (int k = 0; k < modes; ++k) {
                const double w = (k + 1) * M_PI;
                v += coef[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)] * std::sin(w * tau);
                vd += coef[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)] * w *
                      std::cos(w * tau) / (b - a);
            }
            V.values[i][c] = v;
            V.derivs[i][c] = vd;
        }
    }
    // exact zeros at the ends
    std::fill(V.values.front().begin(), V.values.front().end(), 0.0);
    std::fill(V.values.back().begin(), V.values.back().end(), 0.0);
    return V;
}

VariationField transport(const VariationField& V, const PathSample& from, const PathSample& to) {
    if (V.size() != from.size() || from.size() != to.size())
        throw GridMismatch("transport: sample counts disagree");
    VariationField out;
    out.kind = V.kind;
    out.values = V.values;
    if (!V.derivs.empty()) {
        out.derivs.resize(V.size());
        for (std::size_t i = 0; i < V.size(); ++i) {
            // d(param_from)/d(param_to) from the two tangent representations
            const double num = dot(to.tangents[i], from.tangents[i]);
            const double den = dot(from.tangents[i], from.tangents[i]);
            const double ratio = num / den;
            out.derivs[i] = ratio * V.derivs[i];
        }
    }
    return out;
}

VariationField project_orthogonal(const MetricField& metric, const PathSample& path,
                                  const VariationField& V) {
    if (V.size() != path.size()) throw GridMismatch("project_orthogonal: grid mismatch");
    VariationField out;
    out.kind = VariationField::Kind::orthogonal;
    out.values.resize(V.size());
    for (std::size_t i = 0; i < V.size(); ++i) {
        const Mat g = metric.components(path.points[i]);
        out.values[i] = project_out(g, path.tangents[i], V.values[i]);
    }
    return out;
}

QuadraticFormReport second_variation_S(const NaturalSystem& sys, const PathSample& path_t,
                                       const VariationField& V, int n_quad) {
    path_t.check_consistent();
    if (path_t.kind != ParamKind::time_t)
        throw GridMismatch("second_variation_S: expected a time-parametrized path");
    check_proper(V);
    if (newton_residual(sys, path_t) > kExtremalTol)
        throw NotAnExtremal("second_variation_S: Newton residual above tolerance");
    const MetricField& g = sys.metric;
    return integrate_form(path_t, V, n_quad,
                          [&](double, const Vec& p, const Vec& T, const Vec& v, const Vec& vd) {
                              const Mat gm = g.components(p);
                              const Christoffel G = christoffel(g, p);
                              Vec DV = vd;
                              const Vec corr = G.contract(T, v);
                              for (std::size_t c = 0; c < DV.size(); ++c) DV[c] += corr[c];
                              const Vec K = curvature_term(g, p, T, v);
                              const Vec HV = nabla_V_gradU(sys, p, v);
                              return metric_dot(gm, DV, DV) - metric_dot(gm, K, v) -
                                     metric_dot(gm, HV, v);
                          });
}

QuadraticFormReport second_variation_S0J(const NaturalSystem& sys, const PathSample& path_s,
                                         const VariationField& V, int n_quad) {
    path_s.check_consistent();
    if (path_s.kind != ParamKind::jacobi_arclength_s)
        throw GridMismatch("second_variation_S0J: expected an arclength-parametrized path");
    check_proper(V);
    const MetricField h = jacobi_metric(sys);
    return integrate_form(path_s, V, n_quad,
                          [&](double, const Vec& p, const Vec& T, const Vec& v, const Vec& vd) {
                              const Mat hm = h.components(p);
                              const Christoffel G = christoffel(h, p);
                              Vec DV = vd;
                              const Vec corr = G.contract(T, v);
                              for (std::size_t c = 0; c < DV.size(); ++c) DV[c] += corr[c];
                              const Vec K = curvature_term(h, p, T, v);
                              return metric_dot(hm, DV, DV) - metric_dot(hm, K, v);
                          });
}

QuadraticFormReport second_variation_LJ(const NaturalSystem& sys, const PathSample& path_s,
                                        const VariationField& V, int n_quad) {
    path_s.check_consistent();
    if (path_s.kind != ParamKind::jacobi_arclength_s)
        throw GridMismatch("second_variation_LJ: expected an arclength-parametrized path");
    check_proper(V);
    const MetricField h = jacobi_metric(sys);
    // On a geodesic D(Vperp)/ds = (DV/ds)perp, so the projected first-derivative
    // form avoids differentiating the projected samples.
    return integrate_form(path_s, V, n_quad,
                          [&](double, const Vec& p, const Vec& T, const Vec& v, const Vec& vd) {
                              const Mat hm = h.components(p);
                              const Christoffel G = christoffel(h, p);
                              Vec DV = vd;
                              const Vec corr = G.contract(T, v);
                              for (std::size_t c = 0; c < DV.size(); ++c) DV[c] += corr[c];
                              const Vec vperp = project_out(hm, T, v);
                              const Vec DVperp = project_out(hm, T, DV);
                              const Vec K = curvature_term(h, p, T, vperp);
                              return metric_dot(hm, DVperp, DVperp) - metric_dot(hm, K, vperp);
                          });
}

double second_variation_S_operator_form(const NaturalSystem& sys, const PathSample& path_t,
                                        const VariationField& V, int n_quad) {
    path_t.check_consistent();
    check_proper(V);
    const int n = n_quad > 0 ? (n_quad + (n_quad % 2)) : kDefaultQuadNodes;
    const PathSample u = path_t.resample_uniform(static_cast<std::size_t>(n) + 1);
    FieldInterp field(path_t, V);
    std::vector<Vec> vals(u.size()), ders(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        vals[i] = field.value(u.grid[i]);
        ders[i] = field.deriv(u.grid[i]);
    }
    const std::vector<Vec> DV = covariant_derivative_along(sys.metric, u, vals, &ders);
    const std::vector<Vec> DDV = covariant_derivative_along(sys.metric, u, DV);  // second differences
    std::vector<double> f(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const Vec K = curvature_term(sys.metric, u.points[i], u.tangents[i], vals[i]);
        const Vec HV = nabla_V_gradU(sys, u.points[i], vals[i]);
        Vec op(vals[i].size());
        for (std::size_t c = 0; c < op.size(); ++c) op[c] = -DDV[i][c] - K[c] - HV[c];
        f[i] = metric_dot(sys.metric.components(u.points[i]), op, vals[i]);
    }
    return simpson(f, u.grid[1] - u.grid[0]);
}

namespace {

// Correction integrand context shared by the theorem residuals.
struct TheoremParts {
    QuadraticFormReport d2S;
    PathSample path_s;
    VariationField V_s;
};

TheoremParts theorem_parts(const NaturalSystem& sys, const PathSample& newton_path,
                           const VariationField& V, int n_quad) {
    TheoremParts parts;
    parts.d2S = second_variation_S(sys, newton_path, V, n_quad);
    parts.path_s = time_to_arclength(sys, newton_path);
    parts.V_s = transport(V, newton_path, parts.path_s);
    return parts;
}

}  // namespace

double theorem1_residual(const NaturalSystem& sys, const PathSample& newton_path,
                         const VariationField& V, int n_quad) {
    const TheoremParts parts = theorem_parts(sys, newton_path, V, n_quad);
    const QuadraticFormReport d2S0J = second_variation_S0J(sys, parts.path_s, parts.V_s, n_quad);
    const MetricField& g = sys.metric;
    // int 2 <gdot, DV/dt>_g <F, V>_g dt with F = grad ln(2(i1 - U))
    const QuadraticFormReport corr = integrate_form(
        newton_path, V, n_quad,
        [&](double, const Vec& p, const Vec& T, const Vec& v, const Vec& vd) {
            const Mat gm = g.components(p);
            const Christoffel G = christoffel(g, p);
            Vec DV = vd;
            const Vec c = G.contract(T, v);
            for (std::size_t k = 0; k < DV.size(); ++k) DV[k] += c[k];
            const double f = 2.0 * (sys.energy_constant - sys.potential(p));
            const double FdotV = -2.0 * dot(sys.grad_U(p), v) / f;  // dln f(V)
            return 2.0 * metric_dot(gm, T, DV) * FdotV;
        });
    return std::fabs(d2S0J.value - parts.d2S.value - corr.value);
}

double theorem2_residual(const NaturalSystem& sys, const PathSample& newton_path,
                         const VariationField& V, int n_quad) {
    const TheoremParts parts = theorem_parts(sys, newton_path, V, n_quad);
    const QuadraticFormReport d2LJ = second_variation_LJ(sys, parts.path_s, parts.V_s, n_quad);
    const MetricField& g = sys.metric;
    // int dt/(2(i1-U)) [ <D(gdot)/dt, V> - <gdot, DV/dt> ]^2; on the extremal
    // D(gdot)/dt = -grad U.
    const QuadraticFormReport corr = integrate_form(
        newton_path, V, n_quad,
        [&](double, const Vec& p, const Vec& T, const Vec& v, const Vec& vd) {
            const Mat gm = g.components(p);
            const Christoffel G = christoffel(g, p);
            Vec DV = vd;
            const Vec c = G.contract(T, v);
            for (std::size_t k = 0; k < DV.size(); ++k) DV[k] += c[k];
            const double f = 2.0 * (sys.energy_constant - sys.potential(p));
            const Vec accel = matvec(inverse(gm), sys.grad_U(p));  // grad U raised
            const double bracket = -metric_dot(gm, accel, v) - metric_dot(gm, T, DV);
            return bracket * bracket / f;
        });
    return std::fabs(d2LJ.value - parts.d2S.value + corr.value);
}

double orthogonal_identity_residual(const NaturalSystem& sys, const PathSample& geodesic_path,
                                    const VariationField& V_orth, int n_quad) {
    geodesic_path.check_consistent();
    const MetricField h = jacobi_metric(sys);
    // require h-orthogonality
    for (std::size_t i = 0; i < geodesic_path.size(); ++i) {
        const Mat hm = h.components(geodesic_path.points[i]);
        const double tn = metric_norm(hm, geodesic_path.tangents[i]);
        const double vn = metric_norm(hm, V_orth.values[i]);
        if (vn > 0 &&
            std::fabs(metric_dot(hm, V_orth.values[i], geodesic_path.tangents[i])) >
                1e-8 * tn * vn)
            throw ImproperVariation("orthogonal_identity_residual: variation not h-orthogonal");
    }
    const PathSample path_t = arclength_to_time(sys, geodesic_path);
    const VariationField V_t = transport(V_orth, geodesic_path, path_t);
    const double d2S = second_variation_S(sys, path_t, V_t, n_quad).value;
    const double d2LJ = second_variation_LJ(sys, geodesic_path, V_orth, n_quad).value;
    // int (<FJ, Vperp>_h)^2 ds; <grad_h phi, V>_h = d phi(V), phi = ln(2(i1-U))
    const QuadraticFormReport corr = integrate_form(
        geodesic_path, V_orth, n_quad,
        [&](double, const Vec& p, const Vec&, const Vec& v, const Vec&) {
            const double f = 2.0 * (sys.energy_constant - sys.potential(p));
            const double FJdotV = -2.0 * dot(sys.grad_U(p), v) / f;
            return FJdotV * FJdotV;
        });
    return std::fabs(d2S - d2LJ - corr.value);
}

}  // namespace mjt
