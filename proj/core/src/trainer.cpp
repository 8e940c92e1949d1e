#include "rlex/trainer.hpp"

#include <cmath>
#include <limits>

namespace rlex {

void TrainConfig::validate() const {
  if (steps < 1) throw std::invalid_argument("TrainConfig: steps must be positive");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning_rate must be positive");
  if (batch_rollouts < 1) throw std::invalid_argument("TrainConfig: batch_rollouts must be positive");
  if (!(init_scale > 0.0)) throw std::invalid_argument("TrainConfig: init_scale must be positive");
  if (!(grad_tolerance > 0.0)) throw std::invalid_argument("TrainConfig: grad_tolerance must be positive");
  if (!(fd_step > 0.0)) throw std::invalid_argument("TrainConfig: fd_step must be positive");
}

namespace {

VectorXd fd_gradient(const ObjectiveEvaluator& ev, const VectorXd& theta, double h) {
  const int l = static_cast<int>(theta.size());
  VectorXd grad(l);
  for (int d = 0; d < l; ++d) {
    VectorXd plus = theta, minus = theta;
    plus[d] += h;
    minus[d] -= h;
    grad[d] = (evaluate_jbar(ev, plus) - evaluate_jbar(ev, minus)) / (2.0 * h);
  }
  return grad;
}

}  // namespace

TrainResult train(const Environment& env, const Architecture& arch,
                  const ObjectiveEvaluator& evaluator, const Box& theta_box,
                  const TrainConfig& cfg) {
  cfg.validate();
  arch.validate();
  if (arch.action_dim() != env.action_dim)
    throw std::invalid_argument("train: architecture action dimension does not match environment");
  const int l = arch.param_count();
  if (theta_box.dim() != l) throw std::invalid_argument("train: theta box dimension mismatch");

  ObjectiveEvaluator ev = evaluator;
  ev.rollouts_per_eval = cfg.batch_rollouts;

  RngStream rng(cfg.seed);
  VectorXd theta(l);
  for (int d = 0; d < l; ++d) theta[d] = cfg.init_scale * rng.normal();
  theta = theta_box.clamp(theta);

  TrainResult result;
  result.policy = make_policy(arch, theta);
  double best_value = evaluate_jbar(ev, theta);
  VectorXd best_theta = theta;
  double best_grad_norm = std::numeric_limits<double>::infinity();

  for (int step = 0; step < cfg.steps; ++step) {
    const VectorXd grad = fd_gradient(ev, theta, cfg.fd_step);
    const double grad_norm = grad.lpNorm<Eigen::Infinity>();
    const double value = evaluate_jbar(ev, theta);
    result.history.push_back({static_cast<double>(step), value, grad_norm});
    if (value > best_value || (value == best_value && grad_norm < best_grad_norm)) {
      best_value = value;
      best_theta = theta;
      best_grad_norm = grad_norm;
    }
    if (grad_norm <= cfg.grad_tolerance) {
      result.converged = true;
      best_theta = theta;
      best_value = value;
      best_grad_norm = grad_norm;
      break;
    }
    theta = theta_box.clamp(theta + cfg.learning_rate * grad);
  }

  if (!result.converged) {
    // Re-measure stationarity at the returned point.
    best_grad_norm = fd_gradient(ev, best_theta, cfg.fd_step).lpNorm<Eigen::Infinity>();
    result.converged = best_grad_norm <= cfg.grad_tolerance;
  }
  result.policy = make_policy(arch, best_theta);
  result.final_grad_norm = best_grad_norm;
  result.final_objective = best_value;
  return result;
}

}  // namespace rlex
