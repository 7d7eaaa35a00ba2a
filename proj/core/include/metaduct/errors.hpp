#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace metaduct {

// Bad input: malformed files, out-of-range parameters, inconsistent geometry.
// The CLI maps these to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation that could not produce a trustworthy number. The CLI maps
// these to exit code 2. Carries the offending frequency when there is one.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what,
                          std::optional<double> frequency_hz = std::nullopt)
      : std::runtime_error(what), frequency_(frequency_hz) {}

  [[nodiscard]] std::optional<double> frequency() const { return frequency_; }

 private:
  std::optional<double> frequency_;
};

// T == 0 cannot be inverted into a transfer matrix.
class SingularMeasurementError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Zero denominator in the forward T/R formulas.
class DegenerateSampleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Singular or badly conditioned dense system.
class IllConditionedError : public NumericalError {
 public:
  IllConditionedError(const std::string& what, double condition,
                      std::optional<double> frequency_hz = std::nullopt)
      : NumericalError(what, frequency_hz), condition_(condition) {}

  [[nodiscard]] double condition() const { return condition_; }

 private:
  double condition_;
};

// Modal sum did not settle within the requested tolerance.
class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace metaduct
