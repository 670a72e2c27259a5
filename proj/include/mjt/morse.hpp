#ifndef MJT_MORSE_HPP
#define MJT_MORSE_HPP

#include <cstdint>
#include <utility>

#include "mjt/riemann.hpp"

namespace mjt {

// A one-parameter family of extremals; `sample` returns the member points on
// a parameter grid. `member_residual`, when supplied, lets the field
// extractor verify that sampled members are extremals.
struct SolutionFamily {
    std::function<std::vector<Vec>(double a, const std::vector<double>& grid)> sample;
    ParamKind kind = ParamKind::jacobi_arclength_s;
    double a_scale = 1.0;
    std::function<double(double a)> member_residual;  // optional
    double residual_tolerance = 1e-4;
};

// d(gamma)/da at a0 by central differences with one Richardson pass.
std::vector<Vec> jacobi_field_from_family(const SolutionFamily& family, double a0,
                                          const std::vector<double>& grid, double h_a = 0.0);

// max_i || D^2 J/ds^2 + R(gamma', J) gamma' ||_g over interior samples.
double jacobi_equation_residual(const MetricField& metric, const PathSample& geodesic,
                                const std::vector<Vec>& J);

struct ConjugatePointRecord {
    double parameter_value = 0;
    int multiplicity = 1;
    double detection_margin = 0;
};

// Zeros of the orthogonal amplitude j(s) = <J, n> crossed with a confirmed
// sign change, excluding a window around the base point. dim 2 only.
std::vector<ConjugatePointRecord> conjugate_points(const MetricField& metric,
                                                   const PathSample& geodesic,
                                                   const std::vector<Vec>& J_orth,
                                                   double base_exclusion,
                                                   std::vector<double>* touch_warnings = nullptr);

int morse_index(const std::vector<ConjugatePointRecord>& records);

// k-fold iterate of a closed extremal by grid concatenation; the junction
// sample (the base point itself) is shared between passes and carries the
// exact field zero. The field is continued C^1 through each junction, so a
// junction conjugate point is detected once as a sign-confirmed crossing.
struct IteratedPath {
    PathSample path;
    std::vector<Vec> field;
};

IteratedPath iterate_with_field(const PathSample& base, const std::vector<Vec>& field, int passes,
                                const Vec& junction_point);

// Integer-coefficient truncated power series in t.
struct FormalSeries {
    std::vector<long long> coef;  // index = power of t

    FormalSeries() = default;
    explicit FormalSeries(int truncation) : coef(static_cast<std::size_t>(truncation) + 1, 0) {}

    int truncation() const { return static_cast<int>(coef.size()) - 1; }

    static FormalSeries one(int truncation) {
        FormalSeries s(truncation);
        s.coef[0] = 1;
        return s;
    }

    FormalSeries operator+(const FormalSeries& o) const;
    FormalSeries operator*(const FormalSeries& o) const;  // truncated product
    bool operator==(const FormalSeries& o) const { return coef == o.coef; }

    // multiply by t^k (shift), dropping overflowing powers
    FormalSeries shifted(int k) const;
};

// Morse series sum P_t(N_c) t^{mu(N_c)} over critical manifolds.
FormalSeries morse_series(const std::vector<std::pair<FormalSeries, int>>& contributions,
                          int truncation);

// Poincare series of the based loop space of S^n, n in {2, 3}:
// 1/(1-t) and 1/(1-t^2).
FormalSeries poincare_series_loop_sphere(int n, int truncation);

// Coefficientwise Morse inequality M_t >= P_t.
bool morse_inequality_check(const FormalSeries& morse, const FormalSeries& poincare);

}  // namespace mjt

#endif
