#pragma once

#include <stdexcept>

namespace epiident {

// Bad configuration or a violated call contract (CLI exit code 2).
struct InvalidArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ParseError : InvalidArgumentError {
  using InvalidArgumentError::InvalidArgumentError;
};

// Numerical failure: root bracketing, integration breakdown, degenerate
// curve evaluation (CLI exit code 3).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RootBracketingError : NumericalError {
  using NumericalError::NumericalError;
};

struct NoIntersectionError : NumericalError {
  using NumericalError::NumericalError;
};

struct SingularStateError : NumericalError {
  using NumericalError::NumericalError;
};

struct IntegrationError : NumericalError {
  using NumericalError::NumericalError;
};

struct StepSizeUnderflowError : IntegrationError {
  using IntegrationError::IntegrationError;
};

struct DegenerateCurveError : NumericalError {
  using NumericalError::NumericalError;
};

// Structural identifiability failure (CLI exit code 4).
struct UnidentifiableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The observable pair constrains only a parameter combination, never the
// individual parameters; no measurement accuracy can fix that.
struct StrongUnidentifiabilityError : UnidentifiableError {
  using UnidentifiableError::UnidentifiableError;
};

struct DegeneratePairError : UnidentifiableError {
  using UnidentifiableError::UnidentifiableError;
};

}  // namespace epiident
