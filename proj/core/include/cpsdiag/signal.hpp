#pragma once

#include "cpsdiag/linalg.hpp"

#include <variant>
#include <vector>

namespace cpsdiag {

/// Time-parameterized vector signal. Immutable once built; evaluation is pure.
///
/// Every kind is vector-valued with a fixed dimension. Factories validate
/// parameters and throw ValidationError on non-finite or inconsistent input.
class Signal {
 public:
  struct Constant {
    Vector value;
  };
  /// `before` for t < time, `after` from time on.
  struct Step {
    double time;
    Vector before;
    Vector after;
  };
  /// offset + slope * max(0, t - start).
  struct Ramp {
    double start;
    Vector slope;
    Vector offset;
  };
  /// amplitude * (1 - exp(-rate * t)), rate >= 0.
  struct ExpSaturation {
    Vector amplitude;
    double rate;
  };
  /// amplitude * sin(omega * t + phase).
  struct Sinusoid {
    Vector amplitude;
    double omega;
    double phase;
  };
  /// Linear interpolation between samples; holds the end values outside the span.
  struct Piecewise {
    std::vector<double> times;
    std::vector<Vector> values;
  };
  /// Weighted sum of sub-signals of equal dimension.
  struct Sum {
    std::vector<double> weights;
    std::vector<Signal> terms;
  };

  using Kind = std::variant<Constant, Step, Ramp, ExpSaturation, Sinusoid, Piecewise, Sum>;

  static Signal constant(Vector value);
  static Signal step(double time, Vector before, Vector after);
  static Signal ramp(double start, Vector slope, Vector offset);
  static Signal exp_saturation(Vector amplitude, double rate);
  static Signal sinusoid(Vector amplitude, double omega, double phase = 0.0);
  static Signal piecewise(std::vector<double> times, std::vector<Vector> values);
  static Signal sum(std::vector<Signal> terms, std::vector<double> weights = {});
  static Signal zero(Index dimension);

  Index dimension() const noexcept { return dimension_; }
  const Kind& kind() const noexcept { return kind_; }

  Vector operator()(double t) const;

  /// Writes the value at `t` into `out` (sized `dimension()`), allocation free.
  void evaluate(double t, Eigen::Ref<Vector> out) const;

 private:
  Signal(Kind kind, Index dimension) : kind_(std::move(kind)), dimension_(dimension) {}

  void accumulate(double t, double weight, Eigen::Ref<Vector> out) const;

  Kind kind_;
  Index dimension_;
};

}  // namespace cpsdiag
