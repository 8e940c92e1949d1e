#include "bench_common.hpp"

#include <benchmark/benchmark.h>

using namespace rlex;

namespace {

void BM_gradient_grid_sampling(benchmark::State& state) {
  const AnalyticObjective obj = bench::bowl(2);
  const ObjectiveEvaluator ev =
      make_evaluator(synthetic_env(obj), Architecture::constant(2, 2), 0, 0.0, 1, 17);
  const ParameterGrid grid = build_grid(obj.domain, 2.0 / state.range(0));

  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_gradient_grid(ev, grid, 0.01));
  }
  state.SetItemsProcessed(state.iterations() * grid.size() * 3);
}
BENCHMARK(BM_gradient_grid_sampling)->Arg(20)->Arg(60);

void BM_surrogate_eval(benchmark::State& state) {
  const Surrogate sur = bench::fitted_surrogate(2, 0.1, static_cast<int>(state.range(0)));
  RngStream rng(9);
  VectorXd theta = sur.box.sample(rng);

  for (auto _ : state) {
    benchmark::DoNotOptimize(sur.eval_all(theta));
    theta[0] = -theta[0];
  }
}
BENCHMARK(BM_surrogate_eval)->Arg(64)->Arg(256);

void BM_mkl_fit(benchmark::State& state) {
  const AnalyticObjective obj = bench::bowl(2);
  const ObjectiveEvaluator ev =
      make_evaluator(synthetic_env(obj), Architecture::constant(2, 2), 0, 0.0, 1, 17);
  const ParameterGrid grid = build_grid(obj.domain, 0.05);
  const GradientSamples samples = sample_gradient_grid(ev, grid, 0.01);

  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_mkl(samples,
                                     {{KernelSpec::Type::gaussian, 0.8},
                                      {KernelSpec::Type::linear, 0.0}},
                                     static_cast<int>(state.range(0)), 1e-8, 5));
  }
}
BENCHMARK(BM_mkl_fit)->Arg(128)->Arg(256);

}  // namespace
