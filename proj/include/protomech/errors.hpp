#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace protomech {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: non-finite values, size or grid mismatches.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A state violates its type invariant (e.g. a phase field off the unit circle).
class InvalidState : public Error {
 public:
  using Error::Error;
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Requested time step violates a stability bound; carries the admissible step.
class StepSizeError : public Error {
 public:
  StepSizeError(const std::string& what, double admissible_dt)
      : Error(what), admissible_dt_(admissible_dt) {}
  double admissible_dt() const { return admissible_dt_; }

 private:
  double admissible_dt_;
};

/// A pointwise operation is undefined at some grid points (division by zero,
/// wave-function nodes).
class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::vector<std::size_t> points)
      : Error(what), points_(std::move(points)) {}
  const std::vector<std::size_t>& points() const { return points_; }

 private:
  std::vector<std::size_t> points_;
};

/// Conservation monitor tripped during time integration.
class IntegrationFault : public Error {
 public:
  using Error::Error;
};

/// Phase-space support leaked through the momentum truncation box.
class TruncationError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class PositivityFault : public Error {
 public:
  using Error::Error;
};

}  // namespace protomech
