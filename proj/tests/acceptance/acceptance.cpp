// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "cpsdiag/design.hpp"
#include "cpsdiag/distinguisher.hpp"
#include "cpsdiag/reference_scenarios.hpp"
#include "cpsdiag/sim.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace cpsdiag;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << (detail.tellp() > 0 ? "; " : "") << "failed: " << what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same_bits(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::memcmp(a[i].data(), b[i].data(), sizeof(double) * a[i].size()) != 0) return false;
  }
  return true;
}

Outcome case2_reproduction() {
  Outcome o;
  const Scenario sc = reference::make("case2");
  const auto t0 = std::chrono::steady_clock::now();
  const Trajectory tr = run_scenario(sc);
  const double runtime = seconds_since(t0);

  double worst_x = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    if (tr.times[k] >= 1.0) worst_x = std::max(worst_x, (tr.x[k] - Vector::Ones(2)).lpNorm<Eigen::Infinity>());
  }
  const double T = tr.times.back();
  const Vector b_alpha = Vector{{3.0, 2.0}} * (10.0 - (2.0 + std::sin(0.5 * T)));
  const double est_err = (tr.eta_hat.back() - b_alpha).norm() / b_alpha.norm();

  o.require(worst_x <= 0.01, "plant state within 1% of [1,1] after t = 1");
  o.require(tr.verdict.metric_at_decision < -tr.verdict.delta, "trailing metric below -delta");
  o.require(tr.verdict.label == VerdictLabel::Cyberattack, "verdict cyberattack");
  o.require(est_err <= 0.05, "eta_hat(T) within 5% of B alpha(T)");
  o.require(runtime < 5.0, "runtime under 5 s");
  o.detail << (o.pass ? "" : " | ") << "verdict=" << to_string(tr.verdict.label)
           << " M=" << tr.verdict.metric_at_decision << " delta=" << tr.verdict.delta
           << " max|x-1| after 1s=" << worst_x << " rel eta err=" << est_err
           << " runtime=" << runtime << "s";
  return o;
}

Outcome case1_reproduction() {
  Outcome o;
  {
    const Trajectory tr = run_scenario(reference::make("case1-fast"));
    const double T = tr.times.back();
    const Vector ef = Vector{{2.0, 5.0}} * (5.0 * (1.0 - std::exp(-10.0 * T)));
    const double est_err = (tr.eta_hat.back() - ef).norm() / ef.norm();
    o.require(tr.verdict.metric_at_decision > tr.verdict.delta, "case1-fast trailing metric above delta");
    o.require(tr.verdict.label == VerdictLabel::Fault, "case1-fast verdict fault");
    o.require(est_err <= 0.05, "case1-fast eta_hat(T) within 5% of E f(T)");
    o.require((ef - Vector{{10.0, 25.0}}).norm() < 1e-6, "E f(2) close to [10, 25]");
    o.detail << "case1-fast: verdict=" << to_string(tr.verdict.label)
             << " M=" << tr.verdict.metric_at_decision << " delta=" << tr.verdict.delta
             << " rel eta err=" << est_err;
  }
  {
    const Scenario sc = reference::make("case1-long");
    const Trajectory tr = run_scenario(sc);
    const double window_start = sc.settings().horizon * (1.0 - sc.settings().trailing_fraction);
    std::size_t negatives = 0, samples = 0;
    for (const auto& m : tr.metric) {
      if (m && m->t >= window_start) {
        ++samples;
        if (m->value < 0.0) ++negatives;
      }
    }
    const bool fault = tr.verdict.label == VerdictLabel::Fault;
    const bool below_floor = tr.verdict.label == VerdictLabel::Inconclusive &&
                             tr.verdict.reason == InconclusiveReason::EstimateBelowFloor;
    o.require(fault || below_floor, "literal case1 verdict fault or inconclusive below floor");
    o.require(negatives == 0 && tr.verdict.metric_at_decision >= 0.0,
              "literal case1 metric never negative in the trailing window");
    o.detail << " | case1 literal (T=1e4 s, dt=1e-3): verdict=" << to_string(tr.verdict.label)
             << " M=" << tr.verdict.metric_at_decision << " negative samples=" << negatives << "/"
             << samples;
  }
  {
    const Trajectory tr = run_scenario(reference::make("case1"));
    o.notes.push_back(std::string("case1 literal at T=2 s: verdict=") +
                      std::string(to_string(tr.verdict.label)) +
                      " M=" + std::to_string(tr.verdict.metric_at_decision) +
                      " delta=" + std::to_string(tr.verdict.delta));
  }
  return o;
}

Outcome metric_points() {
  Outcome o;
  const PlantModel p = reference::plant();
  const double m_attack = distinguishability_metric(p, Vector{{3.0, 2.0}});
  const double m_fault = distinguishability_metric(p, Vector{{2.0, 5.0}});
  const double o_attack = oracle::metric_svd(p.B(), p.E(), Vector{{3.0, 2.0}});
  const double o_fault = oracle::metric_svd(p.B(), p.E(), Vector{{2.0, 5.0}});
  o.require(std::abs(m_attack - (-2.0427)) <= 1e-3, "M([3,2]) = -2.0427");
  o.require(std::abs(m_fault - 3.0508) <= 1e-3, "M([2,5]) = +3.0508");
  o.require(std::abs(m_attack - o_attack) <= 1e-12 && std::abs(m_fault - o_fault) <= 1e-12,
            "agreement with SVD least-squares oracle");
  o.detail << "M([3,2])=" << m_attack << " M([2,5])=" << m_fault << " oracle=(" << o_attack << ", "
           << o_fault << ")";
  return o;
}

Outcome lyapunov_solver() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  double worst_residual = 0.0, worst_oracle = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 1 + trial % 6;
    const Matrix A = oracle::random_hurwitz(n, rng, 0.1 + 0.1 * (trial % 10));
    const Matrix Q = oracle::random_spd(n, rng);
    const Matrix P = solve_lyapunov(A, Q);
    worst_residual = std::max(worst_residual, (A.transpose() * P + P * A + Q).norm() / Q.norm());
    const Matrix Po = oracle::lyapunov_eigen(A, Q);
    worst_oracle = std::max(worst_oracle, (P - Po).norm() / Po.norm());
  }
  const Matrix P = solve_lyapunov(reference::plant().A(), Matrix::Identity(2, 2));
  Matrix closed = Matrix::Zero(2, 2);
  closed(0, 0) = 1.0 / (2.0 * 30.0);
  closed(1, 1) = 1.0 / (2.0 * 20.0);
  const double closed_err = (P - closed).norm();
  o.require(worst_residual <= 1e-8, "relative residual <= 1e-8 on 100 random A");
  o.require(worst_oracle <= 1e-8, "agreement with eigenbasis oracle");
  o.require(closed_err <= 1e-12, "P = diag(1/60, 1/40) for the reference plant");
  o.detail << "worst rel residual=" << worst_residual << " worst oracle gap=" << worst_oracle
           << " closed-form err=" << closed_err;
  return o;
}

Outcome sign_property() {
  Outcome o;
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> dim(2, 5);
  std::uniform_real_distribution<double> scale(-10.0, 10.0);
  int plants = 0;
  double worst_attack = -INFINITY, worst_fault = INFINITY, worst_homog = 0.0;
  int label_flips = 0;
  while (plants < 1000) {
    const Index n = dim(rng);
    const Index p = 1 + static_cast<Index>(rng() % 2);
    const Index q = 1 + static_cast<Index>(rng() % 2);
    const Matrix B = oracle::random_matrix(n, p, rng);
    const Matrix E = oracle::random_matrix(n, q, rng);
    Matrix BE(n, p + q);
    BE << B, E;
    if (p == q && BE.fullPivLu().rank() == p) continue;
    const PlantModel plant(-Matrix::Identity(n, n), B, E);
    ++plants;
    const Vector eta_a = B * oracle::random_vector(p, rng);
    const Vector eta_f = E * oracle::random_vector(q, rng);
    const double ma = distinguishability_metric(plant, eta_a);
    const double mf = distinguishability_metric(plant, eta_f);
    worst_attack = std::max(worst_attack, ma);
    worst_fault = std::min(worst_fault, mf);
    for (const Vector& eta : {eta_a, eta_f}) {
      double c = scale(rng);
      if (std::abs(c) < 1e-3) c = 1.0;
      const double m1 = distinguishability_metric(plant, eta);
      const double mc = distinguishability_metric(plant, c * eta);
      worst_homog = std::max(worst_homog, std::abs(mc - std::abs(c) * m1));
      const double d1 = kDefaultDeltaRel * eta.norm();
      const double dc = kDefaultDeltaRel * (c * eta).norm();
      if (classify(m1, d1, true) != classify(mc, dc, true)) ++label_flips;
    }
  }
  o.require(worst_attack <= 1e-10, "attack direction metric <= 1e-10");
  o.require(worst_fault >= -1e-10, "fault direction metric >= -1e-10");
  o.require(worst_homog <= 1e-10, "positive homogeneity within 1e-10");
  o.require(label_flips == 0, "label invariant under scaling");
  o.detail << plants << " plants: max M(B alpha)=" << worst_attack << " min M(E f)=" << worst_fault
           << " homogeneity gap=" << worst_homog << " label flips=" << label_flips;
  return o;
}

Outcome mimic_corollary() {
  Outcome o;
  std::mt19937_64 rng(303);
  double worst_mismatch = 0.0, worst_metric = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 2 + trial % 4;
    const Index p = 1 + trial % std::min<Index>(n, 3);
    const Index q = 1 + (trial / 3) % p;
    const Matrix B = oracle::random_matrix(n, p, rng);
    const Matrix E = B * oracle::random_matrix(p, q, rng);
    const PlantModel plant(-Matrix::Identity(n, n), B, E);
    const Vector f = oracle::random_vector(q, rng);
    const MimicReport r = analyze_mimic_attack(plant, f);
    worst_mismatch = std::max(worst_mismatch, (B * r.alpha - E * f).norm());
    worst_metric = std::max(worst_metric, std::abs(distinguishability_metric(plant, B * r.alpha)));
  }
  o.require(worst_mismatch <= 1e-10, "||B alpha* - E f|| <= 1e-10");
  o.require(worst_metric <= 1e-9, "|M(B alpha*)| <= 1e-9");
  o.detail << "1000 instances: worst mismatch=" << worst_mismatch << " worst |M|=" << worst_metric;
  return o;
}

Outcome observer_convergence() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double eps = 2e-4, M = 1.0;
  int within = 0, within_conservative = 0;
  double worst_ratio = 0.0, worst_conservative = 0.0, worst_increase = -INFINITY;
  for (int k = 0; k < 50; ++k) {
    const Index n = 2 + k % 3;
    const Matrix A = oracle::random_hurwitz(n, rng, 0.5 + 2.5 * U(rng));
    const PlantModel plant(A, oracle::random_matrix(n, 1, rng), Matrix::Identity(n, n));
    const Vector f = 0.8 * M * oracle::random_vector(n, rng).normalized();
    const Matrix Q = Matrix::Identity(n, n);
    const Matrix P = solve_lyapunov(A, Q);
    const LyapunovCertificate cert = certify(A, Q, default_gamma(P, M), M);
    const Vector e0 = oracle::random_vector(n, rng).normalized();
    const double t_max = estimate_convergence_time(cert, e0);
    const double t_cons = conservative_convergence_time(cert, e0);

    SimulationSettings s;
    s.dt = 0.2 * eps / (cert.gamma * P.inverse().norm());
    s.horizon = 1.2 * t_cons;
    const Scenario sc(plant, AnomalySignal::fault(Signal::constant(f), M), Signal::zero(1),
                      ObserverDesign::certified(cert, 0.1, eps), e0, Vector::Zero(n), s);
    const Trajectory tr = run_scenario(sc);

    double reached = INFINITY;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      if (tr.residual[i] < 1e-3) {
        reached = tr.times[i];
        break;
      }
    }
    for (std::size_t i = 1; i < tr.size(); ++i) {
      const Vector a = tr.x[i - 1] - tr.x_hat[i - 1];
      const Vector b = tr.x[i] - tr.x_hat[i];
      worst_increase = std::max(worst_increase, b.dot(cert.P * b) - a.dot(cert.P * a));
    }
    if (reached < 1.1 * t_max) ++within;
    if (reached < 1.1 * t_cons) ++within_conservative;
    worst_ratio = std::max(worst_ratio, reached / t_max);
    worst_conservative = std::max(worst_conservative, reached / t_cons);
  }
  o.require(within == 50, "residual < 1e-3 before 1.1 T_max on all 50 plants");
  o.require(worst_increase <= 1e-6, "e^T P e non-increasing per step within 1e-6");
  o.detail << within << "/50 within 1.1 T_max (worst t/T_max=" << worst_ratio
           << ") max per-step V increase=" << worst_increase;
  o.notes.push_back("bound with lambda_max(P): " + std::to_string(within_conservative) +
                    "/50 within 1.1 T, worst t/T=" + std::to_string(worst_conservative));
  return o;
}

Outcome determinism_and_order() {
  Outcome o;
  const Trajectory a = run_scenario(reference::make("case2"));
  const Trajectory b = run_scenario(reference::make("case2"));
  const bool identical = same_bits(a.x, b.x) && same_bits(a.x_hat, b.x_hat) &&
                         same_bits(a.eta_hat, b.eta_hat) && a.verdict.metric_at_decision ==
                                                                b.verdict.metric_at_decision;
  o.require(identical, "repeated case2 runs bitwise identical");

  auto ratios = [](double horizon) {
    auto final_x_hat = [&](double dt) {
      return run_scenario(reference::make("case2", dt, horizon)).x_hat.back();
    };
    const Vector ref = final_x_hat(2.5e-5);
    const double e1 = (final_x_hat(2e-4) - ref).norm();
    const double e2 = (final_x_hat(1e-4) - ref).norm();
    const double e3 = (final_x_hat(5e-5) - ref).norm();
    return std::array<double, 2>{e1 / e2, e2 / e3};
  };
  const auto short_run = ratios(0.02);
  o.require(short_run[0] >= 8.0 && short_run[1] >= 8.0, "error ratio >= 8 for dt halving");
  o.detail << "bitwise identical=" << (identical ? "yes" : "no") << " ratios at T=0.02 s: "
           << short_run[0] << ", " << short_run[1];
  const auto long_run = ratios(2.0);
  o.notes.push_back("ratios at T=2 s (roundoff-limited): " + std::to_string(long_run[0]) + ", " +
                    std::to_string(long_run[1]));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 attack case reproduction", case2_reproduction},
      {"2 fault case reproduction", case1_reproduction},
      {"3 metric point values", metric_points},
      {"4 Lyapunov solver", lyapunov_solver},
      {"5 sign, homogeneity and label invariance", sign_property},
      {"6 fault-mimicking attack", mimic_corollary},
      {"7 observer convergence time", observer_convergence},
      {"8 determinism and convergence order", determinism_and_order},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << ": " << o.detail.str()
              << "  [" << seconds_since(t0) << " s]\n";
    for (const auto& n : o.notes) std::cout << "      note: " << n << '\n';
    std::cout.flush();
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << '\n';
  return failures == 0 ? 0 : 1;
}
