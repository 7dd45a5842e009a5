#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace maxplus {

/// Base class for all library errors. `exit_code()` is the CLI contract:
/// 1 input error, 2 numerical feasibility error, 3 hypothesis violation.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual int exit_code() const noexcept = 0;
};

/// Malformed or dimension-inconsistent input.
class InputError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] int exit_code() const noexcept override { return 1; }
};

/// A matrix that must be positive definite (or invertible) is not. Carries the
/// offending minimum eigenvalue and, when known, the iteration index.
class FeasibilityError : public Error {
 public:
  FeasibilityError(const std::string& what, double min_eigenvalue,
                   std::optional<long> step = std::nullopt)
      : Error(Format(what, min_eigenvalue, step)),
        min_eigenvalue_(min_eigenvalue),
        step_(step) {}

  [[nodiscard]] int exit_code() const noexcept override { return 2; }
  [[nodiscard]] double min_eigenvalue() const noexcept {
    return min_eigenvalue_;
  }
  [[nodiscard]] std::optional<long> step() const noexcept { return step_; }

  /// Re-raise with the iteration index attached.
  [[nodiscard]] FeasibilityError at_step(long step) const {
    return FeasibilityError(reason(), min_eigenvalue_, step);
  }

  [[nodiscard]] std::string reason() const {
    std::string s = what();
    const auto cut = s.find(" (min eigenvalue");
    return cut == std::string::npos ? s : s.substr(0, cut);
  }

 private:
  static std::string Format(const std::string& what, double ev,
                            std::optional<long> step) {
    std::string s = what + " (min eigenvalue " + std::to_string(ev) + ")";
    if (step) s += " at step " + std::to_string(*step);
    return s;
  }

  double min_eigenvalue_;
  std::optional<long> step_;
};

/// An iteration did not reach its tolerance within the allowed budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what + " (last residual " + std::to_string(last_residual) + ")"),
        last_residual_(last_residual) {}
  [[nodiscard]] int exit_code() const noexcept override { return 2; }
  [[nodiscard]] double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// A checkable theorem hypothesis (growth bound, coercivity margin) fails.
class HypothesisError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] int exit_code() const noexcept override { return 3; }
};

}  // namespace maxplus
