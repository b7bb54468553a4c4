#pragma once

#include <stdexcept>
#include <string>

namespace maxent {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments, malformed files or configs. The CLI maps these to exit code 2.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Solver failure, non-finite accumulation, non-SPD matrix. CLI exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace maxent
