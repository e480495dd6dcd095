#include "cpsdiag/design.hpp"
#include "cpsdiag/distinguisher.hpp"
#include "cpsdiag/reference_scenarios.hpp"
#include "cpsdiag/sim.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace cpsdiag;

namespace {

Matrix stable_matrix(Index n) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix A(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) A(i, j) = g(rng);
  }
  const double abscissa = Eigen::EigenSolver<Matrix>(A, false).eigenvalues().real().maxCoeff();
  return A - (abscissa + 1.0) * Matrix::Identity(n, n);
}

void BM_IntegrateStep(benchmark::State& state) {
  const Scenario sc = reference::make("case2");
  const FilterState f = FilterState::initial(sc.x_hat0());
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_step(sc, 0.5, sc.x0(), f));
  }
}
BENCHMARK(BM_IntegrateStep);

void BM_RunCase2(benchmark::State& state) {
  const Scenario sc = reference::make("case2");
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_scenario(sc));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(sc.steps()));
}
BENCHMARK(BM_RunCase2)->Unit(benchmark::kMillisecond);

void BM_SolveLyapunov(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix A = stable_matrix(n);
  const Matrix Q = Matrix::Identity(n, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_lyapunov(A, Q));
  }
}
BENCHMARK(BM_SolveLyapunov)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_Metric(benchmark::State& state) {
  const PlantModel p = reference::plant();
  const Vector eta{{2.0, 5.0}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(distinguishability_metric(p, eta));
  }
}
BENCHMARK(BM_Metric);

}  // namespace

BENCHMARK_MAIN();
