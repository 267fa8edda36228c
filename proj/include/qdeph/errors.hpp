#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qdeph {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive quadrature exhausted its panel budget.
class QuadratureNotConverged : public Error {
 public:
  QuadratureNotConverged(double value, double error_estimate)
      : Error("quadrature did not converge (value " + std::to_string(value) +
              ", error estimate " + std::to_string(error_estimate) + ")"),
        value_(value),
        error_estimate_(error_estimate) {}

  double value() const noexcept { return value_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double value_;
  double error_estimate_;
};

class DiscreteModelHasNoDensity : public Error {
 public:
  DiscreteModelHasNoDensity()
      : Error("discrete mode list has no pointwise spectral density") {}
};

class InvalidInterval : public Error {
 public:
  InvalidInterval(double t_prime, double t)
      : Error("invalid time interval: t' = " + std::to_string(t_prime) +
              " > t = " + std::to_string(t)) {}
};

class InvalidModulus : public Error {
 public:
  explicit InvalidModulus(double abs_d)
      : Error("decoherence modulus outside [0,1]: " + std::to_string(abs_d)) {}
};

/// The two-time map has a negative mixture weight and is not random unitary.
class NotRandomUnitary : public Error {
 public:
  explicit NotRandomUnitary(double negative_weight)
      : Error("two-time map is not random unitary (weight " +
              std::to_string(negative_weight) + ")"),
        weight_(negative_weight) {}

  double weight() const noexcept { return weight_; }

 private:
  double weight_;
};

class UndefinedForPoleState : public Error {
 public:
  UndefinedForPoleState()
      : Error("threshold undefined for a Bloch vector on the z axis") {}
};

class ThresholdInfinite : public Error {
 public:
  ThresholdInfinite() : Error("entanglement threshold is infinite (r <= z^2)") {}
};

class TruncationTooSmall : public Error {
 public:
  TruncationTooSmall(std::size_t cutoff, std::size_t required)
      : Error("Fock cutoff " + std::to_string(cutoff) +
              " leaves thermal tail weight >= 1e-8; need cutoff >= " +
              std::to_string(required)),
        required_(required) {}

  std::size_t required_cutoff() const noexcept { return required_; }

 private:
  std::size_t required_;
};

class DimensionTooLarge : public Error {
 public:
  DimensionTooLarge(std::size_t dim, std::size_t limit)
      : Error("environment dimension " + std::to_string(dim) +
              " exceeds limit " + std::to_string(limit)) {}
};

/// Configuration text could not be turned into a valid scenario.
class ConfigError : public Error {
 public:
  ConfigError(std::size_t line, std::string key, const std::string& what)
      : Error(format(line, key, what)), line_(line), key_(std::move(key)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  static std::string format(std::size_t line, const std::string& key,
                            const std::string& what) {
    std::string out = "config";
    if (line > 0) out += " line " + std::to_string(line);
    if (!key.empty()) out += " key '" + key + "'";
    return out + ": " + what;
  }

  std::size_t line_;
  std::string key_;
};

}  // namespace qdeph
