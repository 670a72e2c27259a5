#ifndef MJT_ERRORS_HPP
#define MJT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mjt {

// Base class for all toolkit errors. The CLI maps these onto exit code 3
// (numerical failure) unless noted otherwise.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct OutOfDomain : Error { using Error::Error; };
struct DegenerateMetric : Error { using Error::Error; };
struct NonPositiveFactor : Error { using Error::Error; };
struct GridMismatch : Error { using Error::Error; };
struct StepUnderflow : Error { using Error::Error; };
struct EnergyMismatch : Error { using Error::Error; };
struct DegenerateFactor : Error { using Error::Error; };
struct NotAnExtremal : Error { using Error::Error; };
struct ImproperVariation : Error { using Error::Error; };
struct ZeroTangent : Error { using Error::Error; };
struct FamilyResidual : Error { using Error::Error; };
struct NoisyAmplitude : Error { using Error::Error; };
struct TruncationOverflow : Error { using Error::Error; };
struct TruncationMismatch : Error { using Error::Error; };
struct Unsupported : Error { using Error::Error; };
struct OutsideChart : Error { using Error::Error; };
struct ChartBoundary : Error { using Error::Error; };
struct SingularFactor : Error { using Error::Error; };
struct DegenerateDiagonal : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct RootNotConverged : Error { using Error::Error; };
struct BranchAmbiguity : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace mjt

#endif
