#pragma once

#include <stdexcept>
#include <string>

namespace avem {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// mesh construction / refinement
struct NonSimplePolygon : Error { using Error::Error; };
struct NegativeArea : Error { using Error::Error; };
struct NonManifoldEdge : Error { using Error::Error; };
struct DanglingVertex : Error { using Error::Error; };
struct NotStarShapedAtBarycenter : Error { using Error::Error; };
struct UnsupportedCombination : Error { using Error::Error; };

// discretization
struct UnsupportedDegree : Error { using Error::Error; };
struct DegenerateCell : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };

// eigensolver
struct ConvergenceFailure : Error { using Error::Error; };
struct InsufficientSpectrum : Error { using Error::Error; };
struct SizeExceeded : Error { using Error::Error; };
struct ZeroEigenvalue : Error { using Error::Error; };
struct SolveFailure : Error { using Error::Error; };

// estimator / adaptivity
struct EmptyIndicators : Error { using Error::Error; };
struct ZeroEstimator : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };

// io
struct IoError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace avem
