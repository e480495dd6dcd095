#include "cpsdiag/distinguisher.hpp"

#include "cpsdiag/errors.hpp"

#include <cmath>
#include <string>

namespace cpsdiag {

std::string_view to_string(VerdictLabel label) noexcept {
  switch (label) {
    case VerdictLabel::Fault:
      return "fault";
    case VerdictLabel::Cyberattack:
      return "cyberattack";
    case VerdictLabel::Indistinguishable:
      return "indistinguishable";
    case VerdictLabel::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

VerdictLabel parse_verdict_label(std::string_view text) {
  for (auto label : {VerdictLabel::Fault, VerdictLabel::Cyberattack,
                     VerdictLabel::Indistinguishable, VerdictLabel::Inconclusive}) {
    if (to_string(label) == text) return label;
  }
  throw ValidationError("unknown verdict label '" + std::string(text) + "'");
}

std::string_view to_string(InconclusiveReason reason) noexcept {
  switch (reason) {
    case InconclusiveReason::None:
      return "none";
    case InconclusiveReason::SlidingNotReached:
      return "sliding-not-reached";
    case InconclusiveReason::EstimateBelowFloor:
      return "estimate-below-floor";
  }
  return "none";
}

double projector_residual(const Matrix& columns, const Eigen::Ref<const Vector>& v) {
  if (!v.allFinite()) throw ValidationError("projected vector has non-finite entries");
  return SubspaceProjector(columns).distance(v);
}

MetricSample metric_sample(const PlantModel& plant, const Eigen::Ref<const Vector>& eta, double t,
                           double floor) {
  require_size(eta, plant.states(), "eta");
  MetricSample s;
  s.t = t;
  s.eta_norm = eta.norm();
  if (!std::isfinite(s.eta_norm)) throw ValidationError("eta has non-finite entries");
  if (!(s.eta_norm > floor)) throw ValidationError("metric undefined for eta == 0");
  s.dist_to_B = plant.attack_space().distance(eta);
  s.dist_to_E = plant.fault_space().distance(eta);
  s.value = s.dist_to_B - s.dist_to_E;
  return s;
}

double distinguishability_metric(const PlantModel& plant, const Eigen::Ref<const Vector>& eta,
                                 double floor) {
  return metric_sample(plant, eta, 0.0, floor).value;
}

VerdictLabel classify(double metric, double delta, bool sliding_reached) {
  if (!(delta >= 0.0)) throw ValidationError("deadband delta must be >= 0");
  if (!sliding_reached) return VerdictLabel::Inconclusive;
  if (metric > delta) return VerdictLabel::Fault;
  if (metric < -delta) return VerdictLabel::Cyberattack;
  return VerdictLabel::Indistinguishable;
}

Vector mimic_attack(const PlantModel& plant, const Eigen::Ref<const Vector>& f) {
  require_size(f, plant.fault_channels(), "fault vector f");
  return plant.attack_space().coefficients(plant.E() * f);
}

MimicReport analyze_mimic_attack(const PlantModel& plant, const Eigen::Ref<const Vector>& f) {
  MimicReport r;
  r.alpha = mimic_attack(plant, f);
  const Vector effect = plant.B() * r.alpha;
  r.mismatch = (effect - plant.E() * f).norm();
  r.metric = effect.norm() > kDefaultMetricFloor ? distinguishability_metric(plant, effect) : 0.0;
  return r;
}

Vector steadystate_attack_policy(const PlantModel& plant, const Eigen::Ref<const Vector>& x_target,
                                 const Eigen::Ref<const Vector>& u) {
  require_size(x_target, plant.states(), "target state");
  require_size(u, plant.inputs(), "input u");
  return -plant.attack_space().coefficients(plant.A() * x_target) - u;
}

Signal steadystate_attack_signal(const PlantModel& plant, const Eigen::Ref<const Vector>& x_target,
                                 const Signal& u) {
  if (u.dimension() != plant.inputs()) {
    throw ValidationError("input signal dimension must equal the column count of B");
  }
  const Vector bias = steadystate_attack_policy(plant, x_target, Vector::Zero(plant.inputs()));
  return Signal::sum({Signal::constant(bias), u}, {1.0, -1.0});
}

}  // namespace cpsdiag
