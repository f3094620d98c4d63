#pragma once

#include <stdexcept>
#include <string>

namespace benard {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or missing configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A configuration that violates a hypothesis of the global existence theorem
/// (q > 3, 3 < r < min{q, 6}).
class HypothesisError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Argument outside the domain of a mathematical operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Fields living on different grids, wrong shapes.
class StructuralError : public Error {
 public:
  using Error::Error;
};

class ViscosityBoundError : public Error {
 public:
  using Error::Error;
};

/// 0/0 situations: zero fields fed to ratios, empty windows.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class StabilityError : public Error {
 public:
  using Error::Error;
};

class PositivityError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver failure; carries the last residual.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace benard
