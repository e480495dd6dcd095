#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace cpsdiag {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs that violate a type invariant or a stated precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The integration produced a non-finite value or left its admissible region.
class NumericalAbort : public Error {
 public:
  NumericalAbort(const std::string& what, double time, std::size_t step)
      : Error(what), time_(time), step_(step) {}

  double time() const noexcept { return time_; }
  std::size_t step() const noexcept { return step_; }

 private:
  double time_;
  std::size_t step_;
};

/// No admissible observer gain exists for the requested design.
class DesignInfeasible : public Error {
 public:
  explicit DesignInfeasible(const std::string& what,
                            std::optional<double> min_gamma = std::nullopt)
      : Error(what), min_gamma_(min_gamma) {}

  /// Smallest admissible gamma (exclusive), when the failure is a margin violation.
  std::optional<double> min_gamma() const noexcept { return min_gamma_; }

 private:
  std::optional<double> min_gamma_;
};

}  // namespace cpsdiag
