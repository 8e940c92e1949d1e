#pragma once

#include "rlex/common.hpp"
#include "rlex/envsim.hpp"

#include <string>
#include <utility>
#include <vector>

namespace rlex {

enum class Activation { relu, identity, tanh_scaled };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

/// Feedforward controller shape. Two kinds:
///  - net: composable layers z -> phi(W z + b), ReLU (or configured) hidden
///    activations and an identity or scaled-tanh output;
///  - constant: pi_theta(s) = theta, the stateless readout used by synthetic
///    landscapes (parameter count equals action dimension, exact G = 1).
struct Architecture {
  enum class Kind { net, constant };

  Kind kind = Kind::net;
  int state_dim = 0;
  int constant_dim = 0;  // action/parameter dimension for Kind::constant
  std::vector<std::pair<int, int>> layers;  // (inputs, outputs) per layer
  Activation hidden = Activation::relu;
  Activation output = Activation::identity;
  double output_scale = 1.0;  // action = scale * tanh(z) for tanh_scaled

  static Architecture net(int state_dim, const std::vector<int>& layer_outputs,
                          Activation output = Activation::identity,
                          double output_scale = 1.0);
  static Architecture constant(int state_dim, int dim);

  int action_dim() const;
  /// Total parameter count: sum over layers of outputs*(inputs+1).
  int param_count() const;
  void validate() const;
};

struct LayerWeights {
  MatrixXd W;
  VectorXd b;
};

struct PolicyParams {
  Architecture arch;
  VectorXd theta;
};

PolicyParams make_policy(const Architecture& arch, VectorXd theta);

/// Canonical layer-major flattening: for each layer, the rows of W followed
/// by b. flatten/unflatten are inverse bijections.
VectorXd flatten(const std::vector<LayerWeights>& layers);
std::vector<LayerWeights> unflatten(const VectorXd& theta, const Architecture& arch);

VectorXd evaluate(const PolicyParams& policy, const VectorXd& state);

/// Jacobian of the action w.r.t. theta (action_dim x param_count), computed
/// by reverse accumulation. ReLU subgradient at a kink is taken as 0.
MatrixXd parameter_jacobian(const PolicyParams& policy, const VectorXd& state);

/// Bounds used by the extraction analysis: G bounds the policy Jacobian in
/// theta, L the second differences, R the reward magnitude.
struct SmoothnessConstants {
  double G = 0.0;
  double L = 0.0;
  double R = 0.0;
  int horizon = 0;
  double gamma = 0.0;
};

struct ConstantsOptions {
  double safety_factor = 1.5;
  int horizon = 0;
  double gamma = 0.0;
  double jacobian_fd_step = 1e-4;
};

/// Sampled estimation of (G, L, R) over theta_box x state_box. G and L carry
/// the safety factor; R is the largest sampled reward magnitude. The sampling
/// is seeded and deterministic.
SmoothnessConstants estimate_constants(const Environment& env, const Architecture& arch,
                                       const Box& theta_box, const Box& state_box,
                                       int samples, std::uint64_t seed,
                                       const ConstantsOptions& opts = {});

}  // namespace rlex
