#include "mjt/morse.hpp"

#include <algorithm>
#include <cmath>

#include "mjt/interp.hpp"

namespace mjt {

std::vector<Vec> jacobi_field_from_family(const SolutionFamily& family, double a0,
                                          const std::vector<double>& grid, double h_a) {
    if (h_a <= 0) h_a = 1e-4 * family.a_scale;
    if (family.member_residual) {
        for (double a : {a0 - h_a, a0 + h_a, a0}) {
            const double r = family.member_residual(a);
            if (r > family.residual_tolerance)
                throw FamilyResidual("jacobi_field_from_family: sampled member fails the extremal test");
        }
    }
    auto central = [&](double h) {
        const std::vector<Vec> plus = family.sample(a0 + h, grid);
        const std::vector<Vec> minus = family.sample(a0 - h, grid);
        if (plus.size() != grid.size() || minus.size() != grid.size())
            throw GridMismatch("jacobi_field_from_family: family sample size mismatch");
        std::vector<Vec> d(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) d[i] = (0.5 / h) * (plus[i] - minus[i]);
        return d;
    };
    const std::vector<Vec> d1 = central(h_a);
    const std::vector<Vec> d2 = central(0.5 * h_a);
    std::vector<Vec> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out[i] = (1.0 / 3.0) * ((4.0 * d2[i]) - d1[i]);
    }
    return out;
}

double jacobi_equation_residual(const MetricField& metric, const PathSample& geodesic,
                                const std::vector<Vec>& J) {
    geodesic.check_consistent();
    if (J.size() != geodesic.size())
        throw GridMismatch("jacobi_equation_residual: field grid differs from path grid");
    const std::vector<Vec> DJ = covariant_derivative_along(metric, geodesic, J);
    const std::vector<Vec> DDJ = covariant_derivative_along(metric, geodesic, DJ);
    double worst = 0;
    for (std::size_t i = 3; i + 3 < geodesic.size(); ++i) {
        const Vec K = curvature_term(metric, geodesic.points[i], geodesic.tangents[i], J[i]);
        Vec r = DDJ[i];
        for (std::size_t c = 0; c < r.size(); ++c) r[c] += K[c];
        worst = std::fmax(worst, metric_norm(metric.components(geodesic.points[i]), r));
    }
    return worst;
}

std::vector<ConjugatePointRecord> conjugate_points(const MetricField& metric,
                                                   const PathSample& geodesic,
                                                   const std::vector<Vec>& J_orth,
                                                   double base_exclusion,
                                                   std::vector<double>* touch_warnings) {
    geodesic.check_consistent();
    if (geodesic.dim() != 2)
        throw Unsupported("conjugate_points: only dimension 2 is supported");
    if (J_orth.size() != geodesic.size())
        throw GridMismatch("conjugate_points: field grid differs from path grid");

    const std::size_t n = geodesic.size();
    // amplitude against the metric-unit normal; the normal is the tangent
    // rotated by +90 degrees and Gram-Schmidt-orthogonalized, so its
    // orientation is fixed by the chart orientation and varies continuously
    // with the tangent.
    std::vector<double> amp(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const Mat g = metric.components(geodesic.points[i]);
        const Vec& T = geodesic.tangents[i];
        const double tn2 = metric_dot(g, T, T);
        if (tn2 < 1e-24) throw ZeroTangent("conjugate_points: vanishing tangent sample");
        Vec nr = {-T[1], T[0]};
        const double c = metric_dot(g, nr, T) / tn2;
        axpy(-c, T, nr);
        const double nn = metric_norm(g, nr);
        if (nn < 1e-300) throw ZeroTangent("conjugate_points: degenerate normal");
        nr = (1.0 / nn) * nr;
        amp[i] = metric_dot(g, J_orth[i], nr);
    }

    double scale = 0;
    for (double v : amp) scale = std::fmax(scale, std::fabs(v));
    if (scale == 0) throw NoisyAmplitude("conjugate_points: amplitude identically zero");
    const double floor = 1e-7 * scale;
    std::size_t below = 0;
    for (double v : amp)
        if (std::fabs(v) < floor) ++below;
    if (below > (4 * n) / 5)
        throw NoisyAmplitude("conjugate_points: amplitude below the noise floor on most samples");

    const double s_base = geodesic.grid.front();
    const double s_min = s_base + base_exclusion;

    // Hermite model of the amplitude for refinement
    HermiteSeries hs;
    hs.x = geodesic.grid;
    hs.f = amp;
    hs.df.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t il = i == 0 ? 0 : i - 1;
        const std::size_t ir = i + 1 == n ? i : i + 1;
        hs.df[i] = (amp[ir] - amp[il]) / (geodesic.grid[ir] - geodesic.grid[il]);
    }

    std::vector<ConjugatePointRecord> records;
    auto push = [&](double root, double margin) {
        if (root <= s_min) return;
        ConjugatePointRecord rec;
        rec.parameter_value = root;
        rec.multiplicity = 1;
        rec.detection_margin = margin;
        records.push_back(rec);
    };

    // exact-zero interior samples: a crossing when the flanking signs differ
    // (a touch without sign change is rejected and reported as a warning)
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (amp[i] != 0.0) continue;
        std::size_t l = i;
        while (l > 0 && amp[l] == 0.0) --l;
        std::size_t r = i;
        while (r + 1 < n && amp[r] == 0.0) ++r;
        if (amp[l] == 0.0 || amp[r] == 0.0) continue;
        if ((amp[l] > 0) != (amp[r] > 0))
            push(geodesic.grid[i], std::fmin(std::fabs(amp[l]), std::fabs(amp[r])));
        else if (touch_warnings)
            touch_warnings->push_back(geodesic.grid[i]);
    }

    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (geodesic.grid[i + 1] <= s_min) continue;
        const double a = amp[i], b = amp[i + 1];
        if (a == 0.0 || b == 0.0) continue;  // handled above
        if ((a > 0) == (b > 0)) {
            if (touch_warnings && i + 2 < n && std::fabs(b) < floor && std::fabs(a) > floor &&
                amp[i + 2] != 0.0 && (a > 0) == (amp[i + 2] > 0) && std::fabs(amp[i + 2]) > floor)
                touch_warnings->push_back(geodesic.grid[i + 1]);
            continue;
        }
        if (std::fmax(std::fabs(a), std::fabs(b)) < floor) continue;
        double lo = geodesic.grid[i], hi = geodesic.grid[i + 1];
        double flo = a;
        for (int k = 0; k < 100 && hi - lo > 1e-8; ++k) {
            const double mid = 0.5 * (lo + hi);
            const double fm = hs.value(mid);
            if ((fm > 0) == (flo > 0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        push(0.5 * (lo + hi), std::fmin(std::fabs(a), std::fabs(b)));
    }
    std::sort(records.begin(), records.end(),
              [](const ConjugatePointRecord& x, const ConjugatePointRecord& y) {
                  return x.parameter_value < y.parameter_value;
              });
    return records;
}

int morse_index(const std::vector<ConjugatePointRecord>& records) {
    int idx = 0;
    for (const auto& r : records) idx += r.multiplicity;
    return idx;
}

IteratedPath iterate_with_field(const PathSample& base, const std::vector<Vec>& field, int passes,
                                const Vec& junction_point) {
    base.check_consistent();
    if (field.size() != base.size()) throw GridMismatch("iterate_with_field: field size mismatch");
    if (passes < 1) throw Error("iterate_with_field: passes must be >= 1");
    const std::size_t n = base.size();
    const double g0 = base.grid.front(), g1 = base.grid.back();
    const double hbar = (g1 - g0) / static_cast<double>(n - 1);
    const double period = (g1 - g0) + 2.0 * hbar;

    // euclidean amplitude signs at the two ends fix the C^1 continuation sign
    auto end_amp = [&](std::size_t i) {
        const Vec& T = base.tangents[i];
        Vec nr = {-T[1], T[0]};
        const double tt = dot(T, T);
        axpy(-dot(nr, T) / tt, T, nr);
        return dot(field[i], nr);
    };
    const double a_out = end_amp(n - 1);
    const double a_in = end_amp(0);
    if (a_in == 0.0 || a_out == 0.0)
        throw NoisyAmplitude("iterate_with_field: field vanishes at the trimmed ends");
    const double c = -a_out / a_in;  // slope-matched crossing at the junction

    IteratedPath out;
    out.path.kind = base.kind;
    double scalef = 1.0;
    for (int p = 0; p < passes; ++p) {
        const double off = p * period;
        if (p > 0) {
            // shared junction sample at the base point
            out.path.grid.push_back(g0 + off - hbar);
            out.path.points.push_back(junction_point);
            out.path.tangents.push_back(base.tangents.front());
            out.path.energies.push_back(base.energies.empty() ? 0.0 : base.energies.front());
            out.field.push_back(Vec(junction_point.size(), 0.0));
            scalef *= c;
        }
        for (std::size_t i = 0; i < n; ++i) {
            out.path.grid.push_back(base.grid[i] + off);
            out.path.points.push_back(base.points[i]);
            out.path.tangents.push_back(base.tangents[i]);
            out.path.energies.push_back(base.energies.empty() ? 0.0 : base.energies[i]);
            out.field.push_back(scalef * field[i]);
        }
    }
    return out;
}

namespace {

long long checked_add(long long a, long long b) {
    long long r;
    if (__builtin_add_overflow(a, b, &r)) throw TruncationOverflow("series coefficient overflow");
    return r;
}

long long checked_mul(long long a, long long b) {
    long long r;
    if (__builtin_mul_overflow(a, b, &r)) throw TruncationOverflow("series coefficient overflow");
    return r;
}

}  // namespace

FormalSeries FormalSeries::operator+(const FormalSeries& o) const {
    if (truncation() != o.truncation())
        throw TruncationMismatch("FormalSeries: truncation orders differ in +");
    FormalSeries r(truncation());
    for (std::size_t i = 0; i < coef.size(); ++i) r.coef[i] = checked_add(coef[i], o.coef[i]);
    return r;
}

FormalSeries FormalSeries::operator*(const FormalSeries& o) const {
    if (truncation() != o.truncation())
        throw TruncationMismatch("FormalSeries: truncation orders differ in *");
    FormalSeries r(truncation());
    for (std::size_t i = 0; i < coef.size(); ++i)
        for (std::size_t j = 0; i + j < coef.size(); ++j)
            r.coef[i + j] = checked_add(r.coef[i + j], checked_mul(coef[i], o.coef[j]));
    return r;
}

FormalSeries FormalSeries::shifted(int k) const {
    FormalSeries r(truncation());
    for (std::size_t i = 0; i + static_cast<std::size_t>(k) < coef.size(); ++i)
        r.coef[i + static_cast<std::size_t>(k)] = coef[i];
    return r;
}

FormalSeries morse_series(const std::vector<std::pair<FormalSeries, int>>& contributions,
                          int truncation) {
    FormalSeries total(truncation);
    for (const auto& [series, index] : contributions) {
        if (index < 0) throw Error("morse_series: negative Morse index");
        if (series.truncation() < truncation)
            throw TruncationMismatch("morse_series: contribution truncated below the target order");
        FormalSeries p(truncation);
        for (int i = 0; i <= truncation; ++i) p.coef[static_cast<std::size_t>(i)] = series.coef[static_cast<std::size_t>(i)];
        total = total + p.shifted(index);
    }
    return total;
}

FormalSeries poincare_series_loop_sphere(int n, int truncation) {
    if (n != 2 && n != 3) throw Unsupported("poincare_series_loop_sphere: n must be 2 or 3");
    FormalSeries s(truncation);
    for (int k = 0; k <= truncation; ++k)
        s.coef[static_cast<std::size_t>(k)] = (n == 2) ? 1 : ((k % 2 == 0) ? 1 : 0);
    return s;
}

bool morse_inequality_check(const FormalSeries& morse, const FormalSeries& poincare) {
    if (morse.truncation() != poincare.truncation())
        throw TruncationMismatch("morse_inequality_check: truncation orders differ");
    for (std::size_t i = 0; i < morse.coef.size(); ++i)
        if (morse.coef[i] < poincare.coef[i]) return false;
    return true;
}

}  // namespace mjt
