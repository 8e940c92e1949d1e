#pragma once

#include "rlex/common.hpp"
#include "rlex/enumerator.hpp"
#include "rlex/envsim.hpp"
#include "rlex/objective.hpp"
#include "rlex/policy.hpp"
#include "rlex/surrogate.hpp"
#include "rlex/trainer.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rlex {

struct EnvironmentConfig {
  std::string preset = "pendulum";  // pendulum | mountain_car | synthetic
  double mass = 1.0;
  double length = 1.0;
  double gravity = 10.0;
  double dt = 0.05;
  double noise_scale = 0.0;
  double goal_position = 0.45;
  std::optional<AnalyticObjective> descriptor;  // synthetic preset
  // Scale factors applied to the physical constants of the attacker's copy
  // of the plant (imperfect side-channel model). Their contribution to the
  // noise bound must be budgeted externally.
  double perturb_mass = 1.0;
  double perturb_length = 1.0;
  double perturb_gravity = 1.0;
};

struct ObjectiveConfig {
  int horizon = 40;
  double discount = 0.9;
  int rollouts_per_eval = 4;
  double noise_confidence = 0.99;
  int noise_probes = 10;
  double injected_noise = 0.0;
  double noise_bound = -1.0;  // < 0: estimate at the sampling stage
};

struct SurrogateConfig {
  double c = 0.05;
  double eta = 0.1;
  std::int64_t sparse_points = 0;  // > 0 switches to the Latin hypercube grid
  std::int64_t grid_cap = 1000000;
  int feature_budget = 256;
  double ridge = 1e-6;
  double safety_factor = 1.5;
  std::uint64_t feature_seed = 99;
  std::vector<KernelSpec> dictionary;
};

struct AttackConfig {
  double psi = 0.04;
  double b_sep = 0.0;  // 0: default to psi / G
  double G = 0.0;      // 0: estimate from samples
  double L = 0.0;
  int constant_samples = 200;
  std::uint64_t constants_seed = 11;
};

struct OnlineConfig {
  int observations = 150;
  std::uint64_t trajectory_seed = 3;
  int sweep_samples = 10000;
  std::uint64_t sweep_seed = 17;
};

struct RunConfig {
  std::uint64_t seed = 1;
  int threads = 0;
  std::filesystem::path workdir = "runs/default";
  std::string fingerprint;  // set by parse_config_text

  EnvironmentConfig environment;
  Architecture architecture = Architecture::net(3, {1, 2, 1}, Activation::tanh_scaled, 2.0);
  double theta_lo = -1.0;
  double theta_hi = 1.0;
  std::vector<double> theta_lo_vec;  // optional per-coordinate bounds
  std::vector<double> theta_hi_vec;

  ObjectiveConfig objective;
  TrainConfig trainer;
  SurrogateConfig surrogate;
  AttackConfig attack;
  SolverConfig solver;
  OnlineConfig online;

  Environment make_environment() const;
  /// The attacker's copy of the plant, with the configured perturbation.
  Environment make_attacker_environment() const;
  Box theta_box() const;
  ObjectiveEvaluator make_attacker_evaluator() const;
  ObjectiveEvaluator make_trainer_evaluator() const;
};

/// Default configuration as pretty-printed JSON (the config-init output).
std::string default_config_text();

/// Parses and validates a config file. Unknown keys, type mismatches and
/// range violations raise ConfigError; the b_sep <= psi/G invariant is
/// enforced here whenever G is given explicitly.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text);

/// FNV-1a fingerprint of the canonicalized config text.
std::string config_fingerprint(const std::string& text);

}  // namespace rlex
