#pragma once

#include <stdexcept>
#include <string>

namespace ssg {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Array or grid shapes that do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A precondition on input data (mean, order, radius, ...) was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Failure reading or writing a snapshot or run artifact.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ssg
