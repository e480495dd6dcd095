#pragma once

#include "cpsdiag/design.hpp"
#include "cpsdiag/distinguisher.hpp"
#include "cpsdiag/filter.hpp"
#include "cpsdiag/model.hpp"
#include "cpsdiag/signal.hpp"

#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cpsdiag {

struct SimulationSettings {
  double horizon = 2.0;
  double dt = 1e-4;
  double delta_rel = kDefaultDeltaRel;
  double metric_floor = kDefaultMetricFloor;
  /// Fraction of the horizon, counted back from the end, averaged for the verdict.
  double trailing_fraction = 0.2;
  /// Consecutive steps with residual below the sliding tolerance before sliding counts as reached.
  std::size_t dwell_steps = 10;
  /// Store every k-th step (the first and last steps are always stored).
  std::size_t record_every = 1;
  std::uint64_t seed = 0;
};

/// Everything one simulation run needs. Validated on construction.
class Scenario {
 public:
  Scenario(PlantModel plant, AnomalySignal anomaly, Signal input, ObserverDesign observer,
           Vector x0, Vector x_hat0, SimulationSettings settings, std::string name = {});

  const PlantModel& plant() const noexcept { return plant_; }
  const AnomalySignal& anomaly() const noexcept { return anomaly_; }
  const Signal& input() const noexcept { return input_; }
  const ObserverDesign& observer() const noexcept { return observer_; }
  const Vector& x0() const noexcept { return x0_; }
  const Vector& x_hat0() const noexcept { return x_hat0_; }
  const SimulationSettings& settings() const noexcept { return settings_; }
  const std::string& name() const noexcept { return name_; }

  /// Number of RK4 steps covering the horizon.
  std::size_t steps() const noexcept { return steps_; }

 private:
  PlantModel plant_;
  AnomalySignal anomaly_;
  Signal input_;
  ObserverDesign observer_;
  Vector x0_;
  Vector x_hat0_;
  SimulationSettings settings_;
  std::string name_;
  std::size_t steps_ = 0;
};

/// Time-indexed record of one run. All series have equal length.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> x;
  std::vector<Vector> x_hat;
  std::vector<Vector> eta_true;
  std::vector<Vector> eta_hat;
  std::vector<double> residual;
  /// Empty before sliding is reached and while ||eta_hat|| is below the metric floor.
  std::vector<std::optional<MetricSample>> metric;

  std::optional<double> sliding_time;
  /// Mean of ||eta_hat|| over the metric samples in the trailing window.
  double trailing_eta_hat_norm = 0.0;
  std::size_t trailing_samples = 0;
  Verdict verdict;

  std::size_t size() const noexcept { return times.size(); }
};

struct StepResult {
  Vector x;
  FilterState filter;
};

/// One classical RK4 step of the coupled (x, x_hat, eta_hat) system from time t.
StepResult integrate_step(const Scenario& scenario, double t, const Vector& x,
                          const FilterState& filter);

/// Runs the scenario over its horizon and classifies the trailing window.
Trajectory run_scenario(const Scenario& scenario);

/// Verdict from recorded metric samples; exposed for re-classification of stored runs.
Verdict decide(const Trajectory& trajectory, const SimulationSettings& settings,
               double* trailing_eta_hat_norm = nullptr, std::size_t* trailing_samples = nullptr);

struct BatchOutcome {
  std::optional<Trajectory> trajectory;
  std::exception_ptr error;
};

/// Runs independent scenarios on up to `jobs` worker threads; results keep input order.
std::vector<BatchOutcome> run_batch(std::span<const Scenario> scenarios, unsigned jobs);

}  // namespace cpsdiag
