#pragma once

#include <stdexcept>
#include <string>

namespace elastinv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a special function or operator.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A request touching the T/V components of an n = 0 mode, where both
/// vector harmonics vanish identically.
class DegenerateModeError : public Error {
 public:
  using Error::Error;
};

/// Degenerate parametrization or a surface that is not star-shaped.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Least-squares boundary fit that did not meet its residual tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual, double condition)
      : Error(what), residual_(residual), condition_(condition) {}

  double residual() const noexcept { return residual_; }
  double condition() const noexcept { return condition_; }

 private:
  double residual_;
  double condition_;
};

/// Malformed or mutually inconsistent input files / configuration.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace elastinv
