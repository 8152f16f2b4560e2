#pragma once

#include <stdexcept>
#include <string>

namespace dephasim {

/// Anything wrong with user-supplied structure: rejected at ingestion.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonHermitianGamma : ValidationError {
  using ValidationError::ValidationError;
};
struct NotPositiveSemidefinite : ValidationError {
  using ValidationError::ValidationError;
};
struct DimensionMismatch : ValidationError {
  using ValidationError::ValidationError;
};
struct EmptySpectrum : ValidationError {
  using ValidationError::ValidationError;
};
struct InvalidSplit : ValidationError {
  using ValidationError::ValidationError;
};
struct InvalidPopulations : ValidationError {
  using ValidationError::ValidationError;
};
struct InvalidScheme : ValidationError {
  using ValidationError::ValidationError;
};
struct UnknownMultiIndex : ValidationError {
  using ValidationError::ValidationError;
};

/// Runtime numerical faults: computation started from valid inputs but could
/// not produce a trustworthy number.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoConvergence : NumericalError {
  using NumericalError::NumericalError;
};
struct IdentificationFailure : NumericalError {
  using NumericalError::NumericalError;
};
struct CoherenceZero : NumericalError {
  using NumericalError::NumericalError;
};

/// Rate-curve pole. Carries the offending time so grid writers can flag the
/// row instead of clipping it.
struct RateDivergence : NumericalError {
  double at_time;
  explicit RateDivergence(const std::string& what, double t)
      : NumericalError(what), at_time(t) {}
};

}  // namespace dephasim
