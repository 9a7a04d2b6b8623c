#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pathcalc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A time does not coincide with a node of the uniform grid.
class GridAlignmentError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation
/// (dimension mismatch, time beyond the horizon, s < t, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A derivative was requested at the right end of the time interval.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

/// Evaluation produced a non-finite number.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The functional has no analytic derivative provider.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Ramp-sequence extrapolation did not settle within its budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> trace)
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

/// An SFDE coefficient read the path beyond the current node.
class CausalityError : public Error {
 public:
  using Error::Error;
};

/// The simulated state became non-finite.
class BlowUpError : public Error {
 public:
  using Error::Error;
};

/// Bad command line or unknown registry id.
class UsageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pathcalc
