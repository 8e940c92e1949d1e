#include "bench_common.hpp"

#include <benchmark/benchmark.h>

using namespace rlex;

namespace {

void BM_interval_solve(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const Surrogate sur = bench::fitted_surrogate(dim, dim < 3 ? 0.1 : 0.25, 128);
  FeasibilityProblem problem;
  problem.surrogate = &sur;
  problem.e = VectorXd::Constant(dim, 0.5);
  problem.box = sur.box;

  SolverConfig cfg;
  cfg.backend = SolverConfig::Backend::interval_bnp;
  cfg.delta = 1e-3;

  std::int64_t boxes = 0;
  for (auto _ : state) {
    const SolveResult res = solve_once(problem, cfg);
    benchmark::DoNotOptimize(res.status);
    boxes += res.stats.boxes_explored;
  }
  state.counters["boxes"] = benchmark::Counter(static_cast<double>(boxes),
                                               benchmark::Counter::kIsRate);
}
BENCHMARK(BM_interval_solve)->Arg(1)->Arg(2)->Arg(3);

void BM_enumeration(benchmark::State& state) {
  const Surrogate sur = bench::fitted_surrogate(2, 0.1, 128);
  SolverConfig cfg;
  cfg.backend = SolverConfig::Backend::multistart;
  cfg.delta = 1e-3;
  cfg.max_candidates = static_cast<int>(state.range(0));
  cfg.seed = 3;

  for (auto _ : state) {
    benchmark::DoNotOptimize(
        enumerate_candidates(sur, VectorXd::Constant(2, 0.5), sur.box, 0.2, cfg));
  }
}
BENCHMARK(BM_enumeration)->Arg(10)->Arg(50);

}  // namespace
