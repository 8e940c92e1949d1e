#include "rlex/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rlex {

ObjectiveEvaluator make_evaluator(Environment env, Architecture arch, int horizon,
                                  double discount, int rollouts_per_eval,
                                  std::uint64_t base_seed) {
  if (horizon < 0) throw std::invalid_argument("horizon must be non-negative");
  if (!(discount >= 0.0 && discount < 1.0))
    throw std::invalid_argument("discount must lie in [0, 1)");
  if (rollouts_per_eval < 1) throw std::invalid_argument("rollouts_per_eval must be >= 1");
  arch.validate();
  if (arch.action_dim() != env.action_dim)
    throw std::invalid_argument("architecture action dimension does not match environment");

  ObjectiveEvaluator ev;
  ev.env = std::move(env);
  ev.arch = std::move(arch);
  ev.horizon = horizon;
  ev.discount = discount;
  ev.rollouts_per_eval = rollouts_per_eval;
  ev.base_seed = base_seed;
  return ev;
}

namespace {

// Bounded deterministic perturbation in [-1, 1), keyed on the exact bit
// pattern of theta.
double signed_hash_noise(const VectorXd& theta) {
  const std::uint64_t h =
      fnv1a(theta.data(), static_cast<std::size_t>(theta.size()) * sizeof(double));
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

}  // namespace

double evaluate_jbar(const ObjectiveEvaluator& ev, const VectorXd& theta) {
  const PolicyParams policy = make_policy(ev.arch, theta);
  const int n = ev.rollouts_per_eval;
  std::vector<double> returns(static_cast<std::size_t>(n));
  if (n >= 8 && thread_count() > 1) {
    parallel_for(n, [&](std::int64_t i) {
      returns[static_cast<std::size_t>(i)] =
          rollout(ev.env, policy, ev.horizon, ev.discount,
                  substream_seed(ev.base_seed, static_cast<std::uint64_t>(i)));
    });
  } else {
    for (int i = 0; i < n; ++i)
      returns[static_cast<std::size_t>(i)] =
          rollout(ev.env, policy, ev.horizon, ev.discount,
                  substream_seed(ev.base_seed, static_cast<std::uint64_t>(i)));
  }
  double sum = 0.0;
  for (double r : returns) sum += r;
  ev.eval_count->fetch_add(1, std::memory_order_relaxed);
  double value = sum / n;
  if (ev.injected_noise_amp > 0.0) value += ev.injected_noise_amp * signed_hash_noise(theta);
  return value;
}

double discounted_weight(double gamma, int horizon) {
  if (gamma == 0.0) return 1.0;
  double w = 0.0, g = 1.0;
  for (int k = 0; k <= horizon; ++k) {
    w += g;
    g *= gamma;
  }
  return w;
}

double estimate_noise_bound(ObjectiveEvaluator& ev, const std::vector<VectorXd>& probes,
                            double confidence, double return_range) {
  if (probes.size() < 10)
    throw std::invalid_argument("estimate_noise_bound: need at least 10 probe points");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("estimate_noise_bound: confidence must lie in (0, 1)");

  if (ev.deterministic()) {
    ev.noise_bound = 0.0;
    return 0.0;
  }

  double bound = 0.0;
  if (!ev.env.deterministic()) {
    double range = return_range;
    if (range <= 0.0)
      range = 2.0 * ev.env.reward_bound * discounted_weight(ev.discount, ev.horizon);

    // Sanity check the claimed range against the observed per-rollout spread.
    for (const VectorXd& theta : probes) {
      const PolicyParams policy = make_policy(ev.arch, theta);
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (int i = 0; i < ev.rollouts_per_eval; ++i) {
        const double r =
            rollout(ev.env, policy, ev.horizon, ev.discount,
                    substream_seed(ev.base_seed, static_cast<std::uint64_t>(i)));
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
      range = std::max(range, hi - lo);
    }

    const double delta = 1.0 - confidence;
    const double n = static_cast<double>(ev.rollouts_per_eval);
    bound = range * std::sqrt(std::log(2.0 / delta) / (2.0 * n));
  }
  bound += ev.injected_noise_amp;
  ev.noise_bound = bound;
  return bound;
}

}  // namespace rlex
