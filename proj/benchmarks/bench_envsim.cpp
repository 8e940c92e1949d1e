#include "bench_common.hpp"

#include "rlex/trainer.hpp"

#include <benchmark/benchmark.h>

using namespace rlex;

namespace {

void BM_pendulum_rollout(benchmark::State& state) {
  const Environment env = pendulum_env(1.0, 1.0, 10.0, 0.05, 0.05);
  const Architecture arch = Architecture::net(3, {1, 2, 1}, Activation::tanh_scaled, 2.0);
  RngStream rng(1);
  VectorXd theta(arch.param_count());
  for (int i = 0; i < theta.size(); ++i) theta[i] = rng.uniform(-1.0, 1.0);
  const PolicyParams policy = make_policy(arch, theta);
  const int horizon = static_cast<int>(state.range(0));

  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rollout(env, policy, horizon, 0.9, seed++));
  }
  state.SetItemsProcessed(state.iterations() * (horizon + 1));
}
BENCHMARK(BM_pendulum_rollout)->Arg(50)->Arg(200);

void BM_jbar_evaluation(benchmark::State& state) {
  const Environment env = pendulum_env(1.0, 1.0, 10.0, 0.05, 0.05);
  const Architecture arch = Architecture::net(3, {1, 2, 1}, Activation::tanh_scaled, 2.0);
  const ObjectiveEvaluator ev =
      make_evaluator(env, arch, 40, 0.9, static_cast<int>(state.range(0)), 3);
  RngStream rng(2);
  VectorXd theta(arch.param_count());
  for (int i = 0; i < theta.size(); ++i) theta[i] = rng.uniform(-1.0, 1.0);

  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_jbar(ev, theta));
    theta[0] = -theta[0];
  }
}
BENCHMARK(BM_jbar_evaluation)->Arg(4)->Arg(64);

}  // namespace
