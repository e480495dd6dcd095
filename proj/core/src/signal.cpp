#include "cpsdiag/signal.hpp"

#include "cpsdiag/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

namespace cpsdiag {
namespace {

void require_finite_vector(const Vector& v, const char* what) {
  if (v.size() < 1) {
    throw ValidationError(std::string("signal ") + what + " must have dimension >= 1");
  }
  if (!v.allFinite()) {
    throw ValidationError(std::string("signal ") + what + " has non-finite entries");
  }
}

void require_finite_scalar(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw ValidationError(std::string("signal ") + what + " is not finite");
  }
}

void require_same_dimension(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) {
    throw ValidationError(std::string("signal ") + what + " dimensions differ");
  }
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

Signal Signal::constant(Vector value) {
  require_finite_vector(value, "constant value");
  const Index n = value.size();
  return Signal(Constant{std::move(value)}, n);
}

Signal Signal::step(double time, Vector before, Vector after) {
  require_finite_scalar(time, "step time");
  require_finite_vector(before, "step before-value");
  require_finite_vector(after, "step after-value");
  require_same_dimension(before, after, "step");
  const Index n = before.size();
  return Signal(Step{time, std::move(before), std::move(after)}, n);
}

Signal Signal::ramp(double start, Vector slope, Vector offset) {
  require_finite_scalar(start, "ramp start");
  require_finite_vector(slope, "ramp slope");
  require_finite_vector(offset, "ramp offset");
  require_same_dimension(slope, offset, "ramp");
  const Index n = slope.size();
  return Signal(Ramp{start, std::move(slope), std::move(offset)}, n);
}

Signal Signal::exp_saturation(Vector amplitude, double rate) {
  require_finite_vector(amplitude, "exponential-saturation amplitude");
  require_finite_scalar(rate, "exponential-saturation rate");
  if (rate < 0.0) {
    throw ValidationError("signal exponential-saturation rate must be >= 0");
  }
  const Index n = amplitude.size();
  return Signal(ExpSaturation{std::move(amplitude), rate}, n);
}

Signal Signal::sinusoid(Vector amplitude, double omega, double phase) {
  require_finite_vector(amplitude, "sinusoid amplitude");
  require_finite_scalar(omega, "sinusoid omega");
  require_finite_scalar(phase, "sinusoid phase");
  const Index n = amplitude.size();
  return Signal(Sinusoid{std::move(amplitude), omega, phase}, n);
}

Signal Signal::piecewise(std::vector<double> times, std::vector<Vector> values) {
  if (times.empty() || times.size() != values.size()) {
    throw ValidationError("signal piecewise-samples needs equally many times and values (>= 1)");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    require_finite_scalar(times[i], "piecewise time");
    require_finite_vector(values[i], "piecewise value");
    require_same_dimension(values[i], values.front(), "piecewise");
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw ValidationError("signal piecewise-samples times must be strictly increasing");
    }
  }
  const Index n = values.front().size();
  return Signal(Piecewise{std::move(times), std::move(values)}, n);
}

Signal Signal::sum(std::vector<Signal> terms, std::vector<double> weights) {
  if (terms.empty()) {
    throw ValidationError("signal composite-sum needs at least one term");
  }
  if (weights.empty()) {
    weights.assign(terms.size(), 1.0);
  }
  if (weights.size() != terms.size()) {
    throw ValidationError("signal composite-sum weights and terms differ in count");
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    require_finite_scalar(weights[i], "composite-sum weight");
    if (terms[i].dimension() != terms.front().dimension()) {
      throw ValidationError("signal composite-sum terms differ in dimension");
    }
  }
  const Index n = terms.front().dimension();
  return Signal(Sum{std::move(weights), std::move(terms)}, n);
}

Signal Signal::zero(Index dimension) { return constant(Vector::Zero(dimension)); }

Vector Signal::operator()(double t) const {
  Vector out(dimension_);
  evaluate(t, out);
  return out;
}

void Signal::evaluate(double t, Eigen::Ref<Vector> out) const {
  out.setZero();
  accumulate(t, 1.0, out);
}

void Signal::accumulate(double t, double weight, Eigen::Ref<Vector> out) const {
  std::visit(
      Overloaded{
          [&](const Constant& k) { out += weight * k.value; },
          [&](const Step& k) { out += weight * (t < k.time ? k.before : k.after); },
          [&](const Ramp& k) {
            out += weight * (k.offset + std::max(0.0, t - k.start) * k.slope);
          },
          [&](const ExpSaturation& k) {
            out += (weight * -std::expm1(-k.rate * t)) * k.amplitude;
          },
          [&](const Sinusoid& k) { out += (weight * std::sin(k.omega * t + k.phase)) * k.amplitude; },
          [&](const Piecewise& k) {
            if (t <= k.times.front()) {
              out += weight * k.values.front();
              return;
            }
            if (t >= k.times.back()) {
              out += weight * k.values.back();
              return;
            }
            const auto hi = std::upper_bound(k.times.begin(), k.times.end(), t);
            const auto i = static_cast<std::size_t>(std::distance(k.times.begin(), hi));
            const double s = (t - k.times[i - 1]) / (k.times[i] - k.times[i - 1]);
            out += (weight * (1.0 - s)) * k.values[i - 1] + (weight * s) * k.values[i];
          },
          [&](const Sum& k) {
            for (std::size_t i = 0; i < k.terms.size(); ++i) {
              k.terms[i].accumulate(t, weight * k.weights[i], out);
            }
          },
      },
      kind_);
}

}  // namespace cpsdiag
