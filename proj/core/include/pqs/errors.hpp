#pragma once

#include <stdexcept>
#include <string>

namespace pqs {

/// Malformed input: bad config lines, invalid arguments to an operation.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation could not produce a meaningful number.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Post-selection onto an event that has exactly zero amplitude.
class ZeroProbabilityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Post-selection probability is positive but below what double precision can renormalize.
class UnderflowError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace pqs
