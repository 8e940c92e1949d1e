#pragma once

#include "rlex/common.hpp"
#include "rlex/envsim.hpp"
#include "rlex/policy.hpp"

#include <atomic>
#include <memory>
#include <vector>

namespace rlex {

/// Monte Carlo estimator of the discounted return J(theta). Uses common
/// random numbers: rollout i always draws from substream(base_seed, i)
/// regardless of theta, so the estimate is a deterministic function of theta
/// and finite differences share trajectory noise.
struct ObjectiveEvaluator {
  Environment env;
  Architecture arch;
  int horizon = 0;
  double discount = 0.0;
  int rollouts_per_eval = 1;
  std::uint64_t base_seed = 0;

  /// High-confidence bound on |Jbar - J| (set by estimate_noise_bound or config).
  double noise_bound = 0.0;

  /// Deterministic bounded perturbation of magnitude <= amp added to every
  /// evaluation; models side-channel error without touching the plant.
  double injected_noise_amp = 0.0;

  std::shared_ptr<std::atomic<std::int64_t>> eval_count =
      std::make_shared<std::atomic<std::int64_t>>(0);

  bool deterministic() const {
    return env.deterministic() && injected_noise_amp == 0.0;
  }
};

ObjectiveEvaluator make_evaluator(Environment env, Architecture arch, int horizon,
                                  double discount, int rollouts_per_eval,
                                  std::uint64_t base_seed);

double evaluate_jbar(const ObjectiveEvaluator& ev, const VectorXd& theta);

/// Sum_{k=0}^{H} gamma^k, the discounted horizon weight.
double discounted_weight(double gamma, int horizon);

/// Hoeffding bound on the Monte Carlo error of the rollout mean at the given
/// confidence, maximized over the probe points. return_range bounds the
/// spread of a single rollout return; pass 0 to derive it from the
/// environment reward bound. Deterministic evaluators yield exactly 0.
double estimate_noise_bound(ObjectiveEvaluator& ev, const std::vector<VectorXd>& probes,
                            double confidence, double return_range = 0.0);

}  // namespace rlex
