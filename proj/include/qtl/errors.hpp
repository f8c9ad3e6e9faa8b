#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace qtl {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape mismatch, bad slot list, index out of range.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value failed one of its invariants. `field()` names the check that
/// failed ("hermiticity", "trace", "positivity", "unitarity", "dims", ...).
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace qtl
