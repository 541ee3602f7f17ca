#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace discwalk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or out-of-domain argument to a numerical routine.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid user-facing input (parameters, grids, lists).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A configuration violates a stability or consistency rule.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Quadrature or iteration could not reach the requested accuracy.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double best_estimate, double error_bound)
      : Error(what), best_estimate_(best_estimate), error_bound_(error_bound) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double best_estimate_;
  double error_bound_;
};

/// Root bracket does not contain a sign change.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// A radial density violates positivity or has a degenerate moment.
class DensityError : public Error {
 public:
  using Error::Error;
};

/// The first-order self-consistency relation has no admissible root.
class RegimeError : public Error {
 public:
  using Error::Error;
};

/// The radial eigenproblem has no normalizable ground state.
class NoBoundStateError : public Error {
 public:
  using Error::Error;
};

/// The self-consistent loop ran out of iterations.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}

  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace discwalk
