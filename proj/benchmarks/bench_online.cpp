#include "rlex/online.hpp"

#include <benchmark/benchmark.h>

using namespace rlex;

namespace {

void BM_filter_observation(benchmark::State& state) {
  const Architecture arch = Architecture::net(3, {1, 2, 1}, Activation::tanh_scaled, 2.0);
  RngStream rng(4);
  std::vector<PolicyParams> candidates;
  for (int i = 0; i < state.range(0); ++i) {
    VectorXd theta(arch.param_count());
    for (int d = 0; d < theta.size(); ++d) theta[d] = rng.uniform(-1.0, 1.0);
    candidates.push_back(make_policy(arch, theta));
  }

  Observation obs;
  obs.k = 0;
  obs.state = VectorXd::Zero(3);
  obs.action = VectorXd::Zero(1);

  // psi large enough that nothing is discarded: every candidate stays hot.
  FilterState fs = init_filter(candidates.size(), 100.0);
  for (auto _ : state) {
    observe(fs, candidates, obs);
    benchmark::DoNotOptimize(fs.max_error.data());
    obs.k++;
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_filter_observation)->Arg(100)->Arg(2000);

}  // namespace
