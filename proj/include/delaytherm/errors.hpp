#pragma once

#include <stdexcept>
#include <string>

namespace delaytherm {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or parameter outside its admissible range.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Malformed or rejected configuration input.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Mutually inconsistent inputs (mismatched grids, inverse pairs, ...).
class InputError : public Error {
public:
  using Error::Error;
};

/// Numeric failure: tolerance not reached, overflow, non-convergence.
/// Carries the achieved error estimate where one is available.
class NumericError : public Error {
public:
  explicit NumericError(const std::string& what, double achieved = -1.0)
      : Error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

private:
  double achieved_;
};

}  // namespace delaytherm
