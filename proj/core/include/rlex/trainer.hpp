#pragma once

#include "rlex/common.hpp"
#include "rlex/objective.hpp"

#include <array>
#include <vector>

namespace rlex {

struct TrainConfig {
  int steps = 300;
  double learning_rate = 0.05;
  int batch_rollouts = 4;
  double init_scale = 0.3;
  std::uint64_t seed = 0;
  double grad_tolerance = 1e-3;  // stationarity threshold on the inf-norm
  double fd_step = 1e-3;         // central-difference step for the gradient

  void validate() const;
};

struct TrainResult {
  PolicyParams policy;
  bool converged = false;
  double final_grad_norm = 0.0;  // inf-norm of the finite-difference gradient
  double final_objective = 0.0;
  // One row per optimizer step: (step, jbar, grad inf-norm).
  std::vector<std::array<double, 3>> history;
};

/// Gradient ascent on the Monte Carlo objective with central finite
/// differences, projected onto theta_box. Returns the best iterate seen; the
/// converged flag reports whether the stationarity tolerance was met.
TrainResult train(const Environment& env, const Architecture& arch,
                  const ObjectiveEvaluator& evaluator, const Box& theta_box,
                  const TrainConfig& cfg);

}  // namespace rlex
