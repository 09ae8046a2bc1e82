#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nbflab {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or usage (bad sizes, out-of-range options). CLI exit 1.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent artifact files. CLI exit 2.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent data across artifacts (coordinate mismatch, missing snapshot).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or numerically invalid states encountered mid-computation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Pseudo-time iteration blew up; keeps the residual trace recorded so far.
class SolverDivergence : public NumericalError {
 public:
  SolverDivergence(const std::string& what, int iteration, int cell,
                   std::vector<double> partial_history)
      : NumericalError(what),
        iteration(iteration),
        cell(cell),
        partial_history(std::move(partial_history)) {}

  int iteration;
  int cell;
  std::vector<double> partial_history;
};

}  // namespace nbflab
