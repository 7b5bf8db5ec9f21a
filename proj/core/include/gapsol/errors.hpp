#pragma once

#include <stdexcept>
#include <string>

namespace gapsol {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated precondition: bad sizes, mismatched grids, out-of-range arguments.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Rejected configuration (unknown key, malformed value, missing preset).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to deliver a trustworthy result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NoGapError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double last_residual, int iterations)
      : NumericalError(what), last_residual_(last_residual), iterations_(iterations) {}

  double last_residual() const noexcept { return last_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  int iterations_;
};

class TrivialSolutionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace gapsol
