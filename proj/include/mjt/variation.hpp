#ifndef MJT_VARIATION_HPP
#define MJT_VARIATION_HPP

#include <cstdint>

#include "mjt/dynamics.hpp"

namespace mjt {

// A vector field along a PathSample, vanishing at both endpoints (proper
// variation). `derivs` holds d(values)/d(param) when known analytically;
// when empty, finite differences of the samples are used.
struct VariationField {
    enum class Kind { general, orthogonal };
    std::vector<Vec> values;
    std::vector<Vec> derivs;
    Kind kind = Kind::general;

    std::size_t size() const { return values.size(); }
};

struct QuadraticFormReport {
    double value = 0;
    double discretization_estimate = 0;  // |I_N - I_{N/2}|, never dropped
};

// Seeded sum of 3-7 sine modes per component, zero at both endpoints, with
// analytic parameter derivatives. Reproducible across runs.
VariationField random_bump_field(const PathSample& path, std::uint64_t seed);

// Same geometric field re-indexed by another parametrization of the same
// curve (sample-aligned paths); values are unchanged, derivatives rescale.
VariationField transport(const VariationField& V, const PathSample& from, const PathSample& to);

// Pointwise orthogonal projection against the path tangent in the metric.
VariationField project_orthogonal(const MetricField& metric, const PathSample& path,
                                  const VariationField& V);

// Second variation of the natural action S = int(T - U)dt about a Newton
// extremal, in first-derivative form:
//   int [ <DV/dt, DV/dt> - <R(gdot,V)gdot, V> - <nabla_V grad U, V> ] dt.
QuadraticFormReport second_variation_S(const NaturalSystem& sys, const PathSample& path_t,
                                       const VariationField& V, int n_quad = 0);

// Second variation of the free action of the Jacobi metric along the
// arc-length parametrization (metric h, no potential).
QuadraticFormReport second_variation_S0J(const NaturalSystem& sys, const PathSample& path_s,
                                         const VariationField& V, int n_quad = 0);

// Second variation of the Jacobi length functional; only the h-orthogonal
// component of V enters.
QuadraticFormReport second_variation_LJ(const NaturalSystem& sys, const PathSample& path_s,
                                        const VariationField& V, int n_quad = 0);

// Operator-form evaluation int <Dbar V, V> dt via second differences; kept
// as a consistency cross-check of the first-derivative form.
double second_variation_S_operator_form(const NaturalSystem& sys, const PathSample& path_t,
                                        const VariationField& V, int n_quad = 0);

// |d2S0J - d2S - int 2<gdot, DV/dt><F, V> dt| with F = grad ln(2(i1-U)).
double theorem1_residual(const NaturalSystem& sys, const PathSample& newton_path,
                         const VariationField& V, int n_quad = 0);

// |d2LJ - d2S + int dt/(2(i1-U)) [<D(gdot)/dt, V> - <gdot, DV/dt>]^2 |.
double theorem2_residual(const NaturalSystem& sys, const PathSample& newton_path,
                         const VariationField& V, int n_quad = 0);

// |d2S|_{V=Vperp} - d2LJ - int (<FJ, Vperp>_h)^2 ds| with FJ the h-gradient
// of ln(2(i1-U)); the constant multiple of the logarithm was calibrated once
// against a validation family and frozen at 1.
double orthogonal_identity_residual(const NaturalSystem& sys, const PathSample& geodesic_path,
                                    const VariationField& V_orth, int n_quad = 0);

}  // namespace mjt

#endif
