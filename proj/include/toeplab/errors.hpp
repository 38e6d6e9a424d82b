#pragma once

#include <stdexcept>
#include <string>

namespace toeplab {

/// Base class for every error raised by the library. Messages are prefixed
/// with the failing operation, e.g. "multiindex::enumerate_fiber: ...".
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: violated precondition, malformed symbol, schema violation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The fiber polytope {x >= 0 : Bt x = k alpha} is not compact.
class UnboundedFiberError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Checked 64-bit integer arithmetic overflowed.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Ill-conditioned fits, eigensolver failures, sampler starvation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace toeplab
