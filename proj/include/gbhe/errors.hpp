#pragma once

#include <stdexcept>
#include <string>

namespace gbhe {

/// Raised when a sparse factorization finds the matrix singular to working precision.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Newton failed to reach the residual tolerance inside the iteration cap.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(int step, int iterations, double residual)
      : std::runtime_error("Newton did not converge at step " + std::to_string(step) + " after " +
                           std::to_string(iterations) + " iterations (residual " +
                           std::to_string(residual) + ")"),
        step_(step),
        iterations_(iterations),
        residual_(residual) {}

  int step() const noexcept { return step_; }
  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int step_;
  int iterations_;
  double residual_;
};

/// A manufactured case cannot supply a term the requested model needs.
class UnsupportedCase : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration parse or validation failure; `line` is 0 when not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace gbhe
