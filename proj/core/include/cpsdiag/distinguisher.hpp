#pragma once

#include "cpsdiag/model.hpp"
#include "cpsdiag/signal.hpp"

#include <string_view>

namespace cpsdiag {

/// Below this norm the metric is undefined (the unknown input is treated as zero).
inline constexpr double kDefaultMetricFloor = 1e-9;
inline constexpr double kDefaultDeltaRel = 0.05;

/// One evaluation of M(eta) = dist(eta, range B) - dist(eta, range E).
struct MetricSample {
  double t = 0.0;
  double value = 0.0;
  double dist_to_B = 0.0;
  double dist_to_E = 0.0;
  double eta_norm = 0.0;
};

enum class VerdictLabel { Fault, Cyberattack, Indistinguishable, Inconclusive };

/// Lower-case label used in reports: "fault", "cyberattack", ...
std::string_view to_string(VerdictLabel label) noexcept;
VerdictLabel parse_verdict_label(std::string_view text);

/// Why a verdict is Inconclusive.
enum class InconclusiveReason { None, SlidingNotReached, EstimateBelowFloor };

std::string_view to_string(InconclusiveReason reason) noexcept;

struct Verdict {
  VerdictLabel label = VerdictLabel::Inconclusive;
  double metric_at_decision = 0.0;
  double decision_time = 0.0;
  double delta = 0.0;
  InconclusiveReason reason = InconclusiveReason::None;
};

/// ||v - M (M^T M)^{-1} M^T v||_2. Throws ValidationError if M loses column rank.
double projector_residual(const Matrix& columns, const Eigen::Ref<const Vector>& v);

/// Throws ValidationError "metric undefined for eta == 0" when ||eta|| <= floor.
MetricSample metric_sample(const PlantModel& plant, const Eigen::Ref<const Vector>& eta,
                           double t = 0.0, double floor = kDefaultMetricFloor);

double distinguishability_metric(const PlantModel& plant, const Eigen::Ref<const Vector>& eta,
                                 double floor = kDefaultMetricFloor);

/// Sign rule with deadband: > delta fault, < -delta cyberattack, otherwise
/// indistinguishable. Inconclusive when sliding was never reached.
VerdictLabel classify(double metric, double delta, bool sliding_reached);

/// alpha* = (B^T B)^{-1} B^T E f, the attack whose effect is closest to the fault E f.
Vector mimic_attack(const PlantModel& plant, const Eigen::Ref<const Vector>& f);

struct MimicReport {
  Vector alpha;
  /// ||B alpha* - E f||; zero exactly when E f lies in range(B).
  double mismatch = 0.0;
  /// M(B alpha*), or 0 when B alpha* is below the metric floor.
  double metric = 0.0;
};

MimicReport analyze_mimic_attack(const PlantModel& plant, const Eigen::Ref<const Vector>& f);

/// alpha = -B^+ A x_target - u: holds the plant at x_target in steady state.
Vector steadystate_attack_policy(const PlantModel& plant, const Eigen::Ref<const Vector>& x_target,
                                 const Eigen::Ref<const Vector>& u);

/// The same policy against a time-varying input: alpha(t) = -B^+ A x_target - u(t).
Signal steadystate_attack_signal(const PlantModel& plant, const Eigen::Ref<const Vector>& x_target,
                                 const Signal& u);

}  // namespace cpsdiag
