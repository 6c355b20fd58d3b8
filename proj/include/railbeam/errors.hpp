#pragma once

#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>

namespace railbeam {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-supplied data (parameters, meshes, signals, configs).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class NonPositiveCoefficient : public ConfigError {
 public:
  explicit NonPositiveCoefficient(std::string name)
      : ConfigError("coefficient '" + name + "' must be strictly positive"),
        name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class NegativeCoefficient : public ConfigError {
 public:
  explicit NegativeCoefficient(std::string name)
      : ConfigError("coefficient '" + name + "' must be >= 0"), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class NegativeDamping : public NegativeCoefficient {
 public:
  NegativeDamping() : NegativeCoefficient("Cd") {}
};

class TooFewElements : public ConfigError {
 public:
  explicit TooFewElements(int n_el)
      : ConfigError("mesh needs at least 2 elements, got " + std::to_string(n_el)) {}
};

class BoundaryMismatch : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InvalidMultiplier : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InfeasibleMultiplier : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InputClassMismatch : public Error {
 public:
  using Error::Error;
};

class NonlinearNotSupported : public Error {
 public:
  NonlinearNotSupported() : Error("modal oracle requires alpha == 0") {}
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class DegenerateData : public Error {
 public:
  using Error::Error;
};

/// Failures of the time integrator. `time()` is the start of the failing step
/// once the simulation driver has attached it.
class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what) : Error(what), text_(what) {}

  const char* what() const noexcept override { return text_.c_str(); }
  std::optional<double> time() const noexcept { return time_; }
  void attach_time(double t) {
    time_ = t;
    char buf[64];
    std::snprintf(buf, sizeof buf, "at t=%.17g: ", t);
    text_ = buf + std::string(Error::what());
  }

 private:
  std::string text_;
  std::optional<double> time_;
};

class NewtonDiverged : public SolverError {
 public:
  NewtonDiverged(int iterations, double residual)
      : SolverError("Newton iteration did not converge after " + std::to_string(iterations) +
                    " iterations (residual " + std::to_string(residual) + ")"),
        iterations(iterations),
        residual(residual) {}
  int iterations;
  double residual;
};

class NonFiniteState : public SolverError {
 public:
  NonFiniteState() : SolverError("state became non-finite") {}
};

}  // namespace railbeam
