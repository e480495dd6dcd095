#include "cpsdiag/sim.hpp"

#include "cpsdiag/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace cpsdiag {
namespace {

std::string describe(const Vector& v) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << ']';
  return os.str();
}

/// Coupled plant + filter ODE with preallocated workspace. z = (x, x_hat, eta_hat).
class CoupledSystem {
 public:
  explicit CoupledSystem(const Scenario& s)
      : s_(s),
        n_(s.plant().states()),
        bound_(s.anomaly().eta_bound() * (1.0 + 1e-12)),
        u_(s.plant().inputs()),
        eta_(n_),
        scratch_(s.anomaly().signal() ? s.anomaly().signal()->dimension() : 0),
        e_(n_),
        nu_(n_),
        k1_(3 * n_),
        k2_(3 * n_),
        k3_(3 * n_),
        k4_(3 * n_),
        stage_(3 * n_) {}

  Index n() const noexcept { return n_; }

  void eta_at(double t, Eigen::Ref<Vector> out) {
    s_.anomaly().eta_into(s_.plant(), t, out, scratch_);
    if (!(out.norm() <= bound_)) {
      std::ostringstream os;
      os.precision(12);
      os << "unknown input exceeds declared bound M = " << s_.anomaly().eta_bound()
         << " at t = " << t << " (||eta|| = " << out.norm() << ")";
      throw ValidationError(os.str());
    }
  }

  void rhs(double t, const Vector& z, Vector& dz) {
    const Matrix& A = s_.plant().A();
    const Matrix& B = s_.plant().B();
    const ObserverDesign& obs = s_.observer();
    s_.input().evaluate(t, u_);
    eta_at(t, eta_);
    const auto x = z.segment(0, n_);
    const auto xh = z.segment(n_, n_);
    const auto eh = z.segment(2 * n_, n_);
    e_ = x - xh;
    injection_term_into(obs.L(), e_, obs.eps(), nu_);
    dz.segment(0, n_).noalias() = A * x;
    dz.segment(0, n_).noalias() += B * u_;
    dz.segment(0, n_) += eta_;
    dz.segment(n_, n_).noalias() = A * xh;
    dz.segment(n_, n_).noalias() += B * u_;
    dz.segment(n_, n_) += nu_;
    dz.segment(2 * n_, n_) = (nu_ - eh) / obs.tau();
  }

  void step(double t, double dt, Vector& z) {
    rhs(t, z, k1_);
    stage_ = z + (0.5 * dt) * k1_;
    rhs(t + 0.5 * dt, stage_, k2_);
    stage_ = z + (0.5 * dt) * k2_;
    rhs(t + 0.5 * dt, stage_, k3_);
    stage_ = z + dt * k3_;
    rhs(t + dt, stage_, k4_);
    z += (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

  const Vector& injection_at(const Vector& z) {
    e_ = z.segment(0, n_) - z.segment(n_, n_);
    injection_term_into(s_.observer().L(), e_, s_.observer().eps(), nu_);
    return nu_;
  }

 private:
  const Scenario& s_;
  Index n_;
  double bound_;
  Vector u_, eta_, scratch_, e_, nu_;
  Vector k1_, k2_, k3_, k4_, stage_;
};

Vector pack(const Vector& x, const FilterState& f) {
  const Index n = x.size();
  Vector z(3 * n);
  z << x, f.x_hat, f.eta_hat;
  return z;
}

}  // namespace

Scenario::Scenario(PlantModel plant, AnomalySignal anomaly, Signal input, ObserverDesign observer,
                   Vector x0, Vector x_hat0, SimulationSettings settings, std::string name)
    : plant_(std::move(plant)),
      anomaly_(std::move(anomaly)),
      input_(std::move(input)),
      observer_(std::move(observer)),
      x0_(std::move(x0)),
      x_hat0_(std::move(x_hat0)),
      settings_(settings),
      name_(std::move(name)) {
  const Index n = plant_.states();
  require_compatible(plant_, anomaly_);
  if (input_.dimension() != plant_.inputs()) {
    throw ValidationError("input signal dimension must equal the column count of B (" +
                          std::to_string(plant_.inputs()) + ")");
  }
  require_shape(observer_.L(), n, n, "gain L");
  require_size(x0_, n, "x0");
  require_size(x_hat0_, n, "x_hat0");
  if (!x0_.allFinite() || !x_hat0_.allFinite()) {
    throw ValidationError("initial conditions must be finite");
  }
  const auto& st = settings_;
  if (!std::isfinite(st.dt) || st.dt <= 0.0) throw ValidationError("dt must be positive");
  if (!std::isfinite(st.horizon) || st.horizon < 10.0 * st.dt * (1.0 - 1e-12)) {
    throw ValidationError("horizon T must be at least 10 dt");
  }
  if (st.dt > observer_.tau() / 10.0 * (1.0 + 1e-12)) {
    throw ValidationError("dt must not exceed tau / 10 to resolve the low-pass filter");
  }
  if (!std::isfinite(st.delta_rel) || st.delta_rel < 0.0) {
    throw ValidationError("delta_rel must be >= 0");
  }
  if (!std::isfinite(st.metric_floor) || st.metric_floor < 0.0) {
    throw ValidationError("metric floor must be >= 0");
  }
  if (!(st.trailing_fraction > 0.0 && st.trailing_fraction <= 1.0)) {
    throw ValidationError("trailing fraction must lie in (0, 1]");
  }
  if (st.dwell_steps < 1) throw ValidationError("dwell steps must be >= 1");
  if (st.record_every < 1) throw ValidationError("record_every must be >= 1");
  steps_ = static_cast<std::size_t>(std::ceil(st.horizon / st.dt - 1e-9));
}

StepResult integrate_step(const Scenario& scenario, double t, const Vector& x,
                          const FilterState& filter) {
  const Index n = scenario.plant().states();
  require_size(x, n, "x");
  require_size(filter.x_hat, n, "x_hat");
  require_size(filter.eta_hat, n, "eta_hat");
  CoupledSystem sys(scenario);
  Vector z = pack(x, filter);
  sys.step(t, scenario.settings().dt, z);
  const double t_next = t + scenario.settings().dt;
  if (!z.allFinite()) {
    throw NumericalAbort("non-finite state after step at t = " + std::to_string(t_next) +
                             "; last finite state " + describe(pack(x, filter)),
                         t_next, 0);
  }
  StepResult r;
  r.x = z.segment(0, n);
  r.filter.x_hat = z.segment(n, n);
  r.filter.eta_hat = z.segment(2 * n, n);
  r.filter.nu_last = sys.injection_at(z);
  return r;
}

Verdict decide(const Trajectory& tr, const SimulationSettings& settings,
               double* trailing_eta_hat_norm, std::size_t* trailing_samples) {
  Verdict v;
  v.decision_time = tr.times.empty() ? 0.0 : tr.times.back();
  if (trailing_eta_hat_norm) *trailing_eta_hat_norm = 0.0;
  if (trailing_samples) *trailing_samples = 0;
  if (!tr.sliding_time) {
    v.label = VerdictLabel::Inconclusive;
    v.reason = InconclusiveReason::SlidingNotReached;
    return v;
  }
  const double window_start = v.decision_time - settings.trailing_fraction * settings.horizon;
  double sum_metric = 0.0;
  double sum_norm = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (tr.times[i] + 1e-12 * settings.horizon < window_start || !tr.metric[i]) continue;
    sum_metric += tr.metric[i]->value;
    sum_norm += tr.metric[i]->eta_norm;
    ++count;
  }
  if (count == 0) {
    v.label = VerdictLabel::Inconclusive;
    v.reason = InconclusiveReason::EstimateBelowFloor;
    return v;
  }
  const double mean_norm = sum_norm / static_cast<double>(count);
  v.metric_at_decision = sum_metric / static_cast<double>(count);
  v.delta = settings.delta_rel * mean_norm;
  v.label = classify(v.metric_at_decision, v.delta, true);
  if (trailing_eta_hat_norm) *trailing_eta_hat_norm = mean_norm;
  if (trailing_samples) *trailing_samples = count;
  return v;
}

Trajectory run_scenario(const Scenario& scenario) {
  const auto& st = scenario.settings();
  const PlantModel& plant = scenario.plant();
  const Index n = plant.states();
  const std::size_t steps = scenario.steps();
  const double tol = scenario.observer().sliding_tol();

  CoupledSystem sys(scenario);
  Vector z = pack(scenario.x0(), FilterState::initial(scenario.x_hat0()));
  Vector z_prev = z;
  Vector eta(n);

  Trajectory tr;
  const std::size_t expected = steps / st.record_every + 2;
  tr.times.reserve(expected);
  tr.x.reserve(expected);
  tr.x_hat.reserve(expected);
  tr.eta_true.reserve(expected);
  tr.eta_hat.reserve(expected);
  tr.residual.reserve(expected);
  tr.metric.reserve(expected);

  auto record = [&](double t) {
    tr.times.push_back(t);
    tr.x.push_back(z.segment(0, n));
    tr.x_hat.push_back(z.segment(n, n));
    sys.eta_at(t, eta);
    tr.eta_true.push_back(eta);
    const auto eh = z.segment(2 * n, n);
    tr.eta_hat.push_back(eh);
    tr.residual.push_back((z.segment(0, n) - z.segment(n, n)).norm());
    std::optional<MetricSample> m;
    if (tr.sliding_time && *tr.sliding_time <= t && eh.norm() > st.metric_floor) {
      m = metric_sample(plant, eh, t, st.metric_floor);
    }
    tr.metric.push_back(m);
  };

  record(0.0);
  std::size_t below = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * st.dt;
    z_prev = z;
    sys.step(t, st.dt, z);
    const double t_next = static_cast<double>(k + 1) * st.dt;
    if (!z.allFinite()) {
      throw NumericalAbort("non-finite state at t = " + std::to_string(t_next) + " (step " +
                               std::to_string(k + 1) + "); last finite state " +
                               describe(z_prev),
                           t_next, k + 1);
    }
    const double residual = (z.segment(0, n) - z.segment(n, n)).norm();
    below = residual < tol ? below + 1 : 0;
    if (!tr.sliding_time && below >= st.dwell_steps) tr.sliding_time = t_next;
    if ((k + 1) % st.record_every == 0 || k + 1 == steps) record(t_next);
  }

  tr.verdict = decide(tr, st, &tr.trailing_eta_hat_norm, &tr.trailing_samples);
  return tr;
}

std::vector<BatchOutcome> run_batch(std::span<const Scenario> scenarios, unsigned jobs) {
  std::vector<BatchOutcome> out(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      try {
        out[i].trajectory = run_scenario(scenarios[i]);
      } catch (...) {
        out[i].error = std::current_exception();
      }
    }
  };
  const unsigned workers =
      std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(scenarios.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace cpsdiag
