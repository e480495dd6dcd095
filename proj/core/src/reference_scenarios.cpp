#include "cpsdiag/reference_scenarios.hpp"

#include "cpsdiag/errors.hpp"

#include <array>
#include <string>

namespace cpsdiag::reference {
namespace {

constexpr std::array<std::string_view, 5> kNames = {"case1", "case1-fast", "case1-long", "case2",
                                                    "none"};

struct Defaults {
  double dt;
  double horizon;
  double eps;
  std::size_t record_every;
};

Defaults defaults_for(std::string_view name) {
  if (name == "case1-long") return {1e-3, 1e4, kEpsLong, 1000};
  return {1e-4, 2.0, kEps, 1};
}

ObserverDesign reference_observer(const PlantModel& p, double eta_bound, double eps) {
  Matrix L = gain();
  GainReport report =
      validate_direct_gain(L, p.A(), eta_bound, Matrix::Identity(p.states(), p.states()));
  return ObserverDesign::direct(std::move(L), std::move(report), kTau, eps);
}

}  // namespace

PlantModel plant() {
  Matrix A(2, 2);
  A << -30.0, 0.0, 0.0, -20.0;
  Matrix B(2, 1);
  B << 3.0, 2.0;
  Matrix E(2, 1);
  E << 2.0, 5.0;
  return PlantModel(A, B, E);
}

Matrix gain() { return 50.0 * Matrix::Identity(2, 2); }

Signal input() {
  return Signal::sum({Signal::constant(Vector::Constant(1, 2.0)),
                      Signal::sinusoid(Vector::Constant(1, 1.0), 0.5)});
}

Vector x0() { return Vector{{0.5, -0.5}}; }
Vector x_hat0() { return Vector::Zero(2); }
Vector attack_target() { return Vector::Ones(2); }

Signal fault_signal(double rate) { return Signal::exp_saturation(Vector::Constant(1, 5.0), rate); }

std::span<const std::string_view> names() { return kNames; }

Scenario make(std::string_view name) {
  const Defaults d = defaults_for(name);
  return make(name, d.dt, d.horizon);
}

Scenario make(std::string_view name, double dt, double horizon) {
  const Defaults d = defaults_for(name);
  PlantModel p = plant();
  SimulationSettings settings;
  settings.dt = dt;
  settings.horizon = horizon;
  settings.record_every = d.record_every;

  std::optional<AnomalySignal> anomaly;
  if (name == "case1" || name == "case1-long") {
    Signal f = fault_signal(1e-4);
    const double M = prescan_eta_bound(p, AnomalyKind::Fault, f, horizon, dt);
    anomaly = AnomalySignal::fault(std::move(f), M);
  } else if (name == "case1-fast") {
    Signal f = fault_signal(10.0);
    const double M = prescan_eta_bound(p, AnomalyKind::Fault, f, horizon, dt);
    anomaly = AnomalySignal::fault(std::move(f), M);
  } else if (name == "case2") {
    Signal alpha = steadystate_attack_signal(p, attack_target(), input());
    const double M = prescan_eta_bound(p, AnomalyKind::Attack, alpha, horizon, dt);
    anomaly = AnomalySignal::attack(std::move(alpha), M);
  } else if (name == "none") {
    anomaly = AnomalySignal::none();
  } else {
    std::string known;
    for (auto n : kNames) known += (known.empty() ? "" : ", ") + std::string(n);
    throw ValidationError("unknown reference case '" + std::string(name) + "' (available: " +
                          known + ")");
  }
  ObserverDesign observer = reference_observer(p, anomaly->eta_bound(), d.eps);
  Vector start_estimate = name == "none" ? x0() : x_hat0();
  return Scenario(std::move(p), std::move(*anomaly), input(), std::move(observer), x0(),
                  std::move(start_estimate), settings, std::string(name));
}

}  // namespace cpsdiag::reference
