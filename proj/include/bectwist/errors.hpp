#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bectwist {

/// Bad or inconsistent input. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A parameter failed validation; `field` names the offending input.
class ValidationError : public ConfigError {
public:
  ValidationError(std::string field, const std::string& what)
      : ConfigError(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// Basis or matrix would exceed the configured size cap.
class SizeError : public ConfigError {
public:
  SizeError(long long dimension, long long estimated_nonzeros, long long cap)
      : ConfigError("Hilbert space too large: dimension " + std::to_string(dimension) +
                    ", estimated nonzeros " + std::to_string(estimated_nonzeros) +
                    " exceeds cap " + std::to_string(cap)),
        dimension_(dimension) {}
  long long dimension() const noexcept { return dimension_; }

private:
  long long dimension_;
};

/// Failure of the numerics themselves. The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Ring condensate at (or beyond) a critical rotation: degenerate ground state or a
/// non-positive Bogoliubov energy. The Bogoliubov approximation is invalid here.
class CriticalRotationError : public NumericalError {
public:
  CriticalRotationError(double q, const std::string& what)
      : NumericalError("Bogoliubov approximation invalid: " + what), q_(q) {}
  /// Offending quasi-momentum (internal units); 0 when the ground state itself is degenerate.
  double q() const noexcept { return q_; }

private:
  double q_;
};

/// Harmonic trap rotating at |Omega| >= omega_tr.
class InstabilityError : public NumericalError {
public:
  explicit InstabilityError(const std::string& what) : NumericalError(what) {}
};

/// Trap mode with vanishing energy and a nonzero contribution to the twist sum.
class ResonantModeError : public NumericalError {
public:
  ResonantModeError(std::vector<std::pair<int, int>> modes, const std::string& what)
      : NumericalError(what), modes_(std::move(modes)) {}
  const std::vector<std::pair<int, int>>& modes() const noexcept { return modes_; }

private:
  std::vector<std::pair<int, int>> modes_;
};

class ConvergenceError : public NumericalError {
public:
  ConvergenceError(double residual, const std::string& what)
      : NumericalError(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

}  // namespace bectwist
