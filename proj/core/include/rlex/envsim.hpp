#pragma once

#include "rlex/common.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rlex {

struct PolicyParams;

// Closed-form objective landscape over a parameter box. Supported family:
// multivariate polynomials plus isotropic Gaussian bumps.
struct PolyTerm {
  double coef = 0.0;
  std::vector<int> exponents;  // one entry per dimension
};

struct GaussTerm {
  double amp = 0.0;
  VectorXd center;
  double sigma = 1.0;
};

struct AnalyticObjective {
  int dim = 0;
  std::vector<PolyTerm> poly;
  std::vector<GaussTerm> gaussians;
  Box domain;

  void validate() const;
  double value(const VectorXd& x) const;
  VectorXd gradient(const VectorXd& x) const;
  /// Sound bound on |value| over the (slightly inflated) domain.
  double magnitude_bound() const;
};

/// Stochastic discrete-time plant with a deterministic reward. Immutable
/// after construction; step/reward/initial_state are pure given the rng
/// stream, so rollouts may run concurrently.
struct Environment {
  std::string name;
  int state_dim = 0;
  int action_dim = 0;
  double process_noise_scale = 0.0;
  double integration_step = 0.0;
  bool stochastic_init = false;

  Box action_box;  // actions are clamped into this box before stepping
  Box state_box;   // sampling region for constant estimation and error sweeps
  double reward_bound = 0.0;  // computable R with |r(s,a)| <= R on the boxes

  std::function<VectorXd(const VectorXd& state, const VectorXd& action, RngStream&)> step;
  std::function<double(const VectorXd& state, const VectorXd& action)> reward;
  std::function<VectorXd(RngStream&)> initial_state;
  std::function<bool(const VectorXd& state)> terminal;  // empty = never

  std::optional<AnalyticObjective> analytic;  // set for synthetic presets

  bool deterministic() const { return process_noise_scale == 0.0 && !stochastic_init; }
};

/// Inverted pendulum with state (x, y, bdot) = (cos b, sin b, bdot).
/// Continuous-time model: dx = -y, dy = x, dbdot = (3*gravity/(2*length))*y
/// + (3/(mass*length^2))*u, integrated by explicit Euler with step dt.
/// Reward: -(b^2 + 0.1*bdot^2 + 0.001*u^2) with b = atan2(y, x).
Environment pendulum_env(double mass = 1.0, double length = 1.0, double gravity = 10.0,
                         double dt = 0.05, double noise_scale = 0.0);

/// Mountain car with state (p, v): dp = v,
/// dv = 0.001*u - 0.0025*cos(3p) - 0.0025*v^2*sin(3p). Walls are inelastic
/// (velocity zeroed on contact). Reward -0.1*u^2 per step, +100 at the goal.
Environment mountain_car_env(double dt = 1.0, double goal_position = 0.45,
                             double noise_scale = 0.0);

/// Deterministic single-step environment whose reward is the descriptor
/// evaluated at the action, so a policy that emits its own parameter vector
/// induces exactly J(theta) = descriptor(theta).
Environment synthetic_env(const AnalyticObjective& objective);

struct Trajectory {
  std::vector<VectorXd> states;   // s^(0..K)
  std::vector<VectorXd> actions;  // executed (clamped) actions
  std::vector<double> rewards;
  std::size_t length() const { return states.size(); }
};

/// Simulates one trajectory of at most horizon+1 steps (fewer if a terminal
/// state is reached). Deterministic given the seed.
Trajectory simulate(const Environment& env, const PolicyParams& policy, int horizon,
                    std::uint64_t seed);

/// Discounted return sum_k gamma^k r(s^(k), a^(k)) of one sampled trajectory.
double rollout(const Environment& env, const PolicyParams& policy, int horizon,
               double discount, std::uint64_t seed);

}  // namespace rlex
