#include "rlex/policy.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace rlex {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::identity: return "identity";
    case Activation::tanh_scaled: return "tanh_scaled";
  }
  return "identity";
}

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "identity") return Activation::identity;
  if (s == "tanh_scaled") return Activation::tanh_scaled;
  throw std::invalid_argument("unknown activation: " + s);
}

Architecture Architecture::net(int state_dim, const std::vector<int>& layer_outputs,
                               Activation output, double output_scale) {
  Architecture arch;
  arch.kind = Kind::net;
  arch.state_dim = state_dim;
  arch.output = output;
  arch.output_scale = output_scale;
  int in = state_dim;
  for (int out : layer_outputs) {
    arch.layers.emplace_back(in, out);
    in = out;
  }
  arch.validate();
  return arch;
}

Architecture Architecture::constant(int state_dim, int dim) {
  Architecture arch;
  arch.kind = Kind::constant;
  arch.state_dim = state_dim;
  arch.constant_dim = dim;
  arch.validate();
  return arch;
}

int Architecture::action_dim() const {
  if (kind == Kind::constant) return constant_dim;
  return layers.empty() ? 0 : layers.back().second;
}

int Architecture::param_count() const {
  if (kind == Kind::constant) return constant_dim;
  int l = 0;
  for (const auto& [in, out] : layers) l += out * (in + 1);
  return l;
}

void Architecture::validate() const {
  if (kind == Kind::constant) {
    if (constant_dim < 1) throw std::invalid_argument("constant policy dimension must be >= 1");
    return;
  }
  if (state_dim < 1) throw std::invalid_argument("state dimension must be >= 1");
  if (layers.empty()) throw std::invalid_argument("net architecture needs at least one layer");
  if (layers.front().first != state_dim)
    throw std::invalid_argument("first layer input must equal the state dimension");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].first < 1 || layers[i].second < 1)
      throw std::invalid_argument("layer dimensions must be positive");
    if (i > 0 && layers[i].first != layers[i - 1].second)
      throw std::invalid_argument("layer dimensions are not composable");
  }
  if (output == Activation::tanh_scaled && !(output_scale > 0.0))
    throw std::invalid_argument("tanh_scaled output requires a positive scale");
}

PolicyParams make_policy(const Architecture& arch, VectorXd theta) {
  arch.validate();
  if (theta.size() != arch.param_count())
    throw std::invalid_argument("theta length does not match the architecture parameter count");
  return PolicyParams{arch, std::move(theta)};
}

VectorXd flatten(const std::vector<LayerWeights>& layers) {
  int l = 0;
  for (const auto& layer : layers)
    l += static_cast<int>(layer.W.rows() * (layer.W.cols() + 1));
  VectorXd theta(l);
  int pos = 0;
  for (const auto& layer : layers) {
    if (layer.b.size() != layer.W.rows())
      throw std::invalid_argument("flatten: bias length does not match weight rows");
    for (int r = 0; r < layer.W.rows(); ++r) {
      for (int c = 0; c < layer.W.cols(); ++c) theta[pos++] = layer.W(r, c);
    }
    for (int r = 0; r < layer.b.size(); ++r) theta[pos++] = layer.b[r];
  }
  return theta;
}

std::vector<LayerWeights> unflatten(const VectorXd& theta, const Architecture& arch) {
  arch.validate();
  if (arch.kind == Architecture::Kind::constant)
    throw std::invalid_argument("constant policies have no layer structure");
  if (theta.size() != arch.param_count())
    throw std::invalid_argument("theta length does not match the architecture parameter count");
  std::vector<LayerWeights> layers;
  layers.reserve(arch.layers.size());
  int pos = 0;
  for (const auto& [in, out] : arch.layers) {
    LayerWeights lw;
    lw.W.resize(out, in);
    lw.b.resize(out);
    for (int r = 0; r < out; ++r) {
      for (int c = 0; c < in; ++c) lw.W(r, c) = theta[pos++];
    }
    for (int r = 0; r < out; ++r) lw.b[r] = theta[pos++];
    layers.push_back(std::move(lw));
  }
  return layers;
}

namespace {

inline double apply_activation(Activation act, double z, double scale) {
  switch (act) {
    case Activation::relu: return z > 0.0 ? z : 0.0;
    case Activation::identity: return z;
    case Activation::tanh_scaled: return scale * std::tanh(z);
  }
  return z;
}

inline double activation_derivative(Activation act, double z, double scale) {
  switch (act) {
    case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::identity: return 1.0;
    case Activation::tanh_scaled: {
      const double t = std::tanh(z);
      return scale * (1.0 - t * t);
    }
  }
  return 1.0;
}

}  // namespace

VectorXd evaluate(const PolicyParams& policy, const VectorXd& state) {
  const Architecture& arch = policy.arch;
  if (arch.kind == Architecture::Kind::constant) {
    if (arch.state_dim > 0 && state.size() != arch.state_dim)
      throw std::invalid_argument("state dimension mismatch");
    return policy.theta;
  }
  if (state.size() != arch.state_dim) throw std::invalid_argument("state dimension mismatch");

  VectorXd z = state;
  int pos = 0;
  const int F = static_cast<int>(arch.layers.size());
  for (int layer = 0; layer < F; ++layer) {
    const auto& [in, out] = arch.layers[layer];
    VectorXd next(out);
    for (int r = 0; r < out; ++r) {
      double acc = 0.0;
      for (int c = 0; c < in; ++c) acc += policy.theta[pos + r * in + c] * z[c];
      acc += policy.theta[pos + out * in + r];
      next[r] = acc;
    }
    pos += out * (in + 1);
    const Activation act = (layer + 1 == F) ? arch.output : arch.hidden;
    for (int r = 0; r < out; ++r) next[r] = apply_activation(act, next[r], arch.output_scale);
    z = std::move(next);
  }
  return z;
}

MatrixXd parameter_jacobian(const PolicyParams& policy, const VectorXd& state) {
  const Architecture& arch = policy.arch;
  const int l = arch.param_count();
  if (arch.kind == Architecture::Kind::constant)
    return MatrixXd::Identity(arch.constant_dim, l);
  if (state.size() != arch.state_dim) throw std::invalid_argument("state dimension mismatch");

  const int F = static_cast<int>(arch.layers.size());
  // Forward pass, keeping per-layer inputs and pre-activations.
  std::vector<VectorXd> inputs(F);
  std::vector<VectorXd> pre(F);
  VectorXd z = state;
  int pos = 0;
  std::vector<int> offsets(F);
  for (int layer = 0; layer < F; ++layer) {
    const auto& [in, out] = arch.layers[layer];
    offsets[layer] = pos;
    inputs[layer] = z;
    VectorXd p(out);
    for (int r = 0; r < out; ++r) {
      double acc = 0.0;
      for (int c = 0; c < in; ++c) acc += policy.theta[pos + r * in + c] * z[c];
      acc += policy.theta[pos + out * in + r];
      p[r] = acc;
    }
    pre[layer] = p;
    pos += out * (in + 1);
    const Activation act = (layer + 1 == F) ? arch.output : arch.hidden;
    VectorXd next(out);
    for (int r = 0; r < out; ++r) next[r] = apply_activation(act, p[r], arch.output_scale);
    z = std::move(next);
  }

  const int m = arch.action_dim();
  MatrixXd jac = MatrixXd::Zero(m, l);
  // Reverse pass per output component.
  for (int comp = 0; comp < m; ++comp) {
    // dz holds d(action_comp)/d(pre-activation of current layer).
    VectorXd dz;
    for (int layer = F - 1; layer >= 0; --layer) {
      const auto& [in, out] = arch.layers[layer];
      const Activation act = (layer + 1 == F) ? arch.output : arch.hidden;
      if (layer == F - 1) {
        dz = VectorXd::Zero(out);
        dz[comp] = activation_derivative(act, pre[layer][comp], arch.output_scale);
      } else {
        for (int r = 0; r < out; ++r)
          dz[r] *= activation_derivative(act, pre[layer][r], arch.output_scale);
      }
      const int base = offsets[layer];
      for (int r = 0; r < out; ++r) {
        if (dz[r] == 0.0) continue;
        for (int c = 0; c < in; ++c) jac(comp, base + r * in + c) = dz[r] * inputs[layer][c];
        jac(comp, base + out * in + r) = dz[r];
      }
      if (layer > 0) {
        VectorXd prev = VectorXd::Zero(in);
        for (int r = 0; r < out; ++r) {
          if (dz[r] == 0.0) continue;
          for (int c = 0; c < in; ++c) prev[c] += dz[r] * policy.theta[base + r * in + c];
        }
        dz = std::move(prev);
      }
    }
  }
  return jac;
}

SmoothnessConstants estimate_constants(const Environment& env, const Architecture& arch,
                                       const Box& theta_box, const Box& state_box,
                                       int samples, std::uint64_t seed,
                                       const ConstantsOptions& opts) {
  arch.validate();
  if (samples < 2) throw std::invalid_argument("estimate_constants: samples must be >= 2");
  if (!theta_box.has_volume() || !state_box.has_volume())
    throw std::invalid_argument("estimate_constants: boxes must have positive volume");
  if (theta_box.dim() != arch.param_count())
    throw std::invalid_argument("estimate_constants: theta box dimension mismatch");

  RngStream rng(seed);
  const int l = arch.param_count();
  const double h = opts.jacobian_fd_step * theta_box.widths().mean();
  double max_jac = 0.0, max_second = 0.0, max_reward = 0.0;
  for (int i = 0; i < samples; ++i) {
    const VectorXd theta = theta_box.sample(rng);
    const VectorXd state = state_box.sample(rng);
    const PolicyParams policy = make_policy(arch, theta);

    const MatrixXd jac = parameter_jacobian(policy, state);
    max_jac = std::max(max_jac, jac.jacobiSvd().singularValues()[0]);

    VectorXd dir(l);
    for (int d = 0; d < l; ++d) dir[d] = rng.normal();
    dir.normalize();
    const MatrixXd jp = parameter_jacobian(make_policy(arch, theta + h * dir), state);
    const MatrixXd jm = parameter_jacobian(make_policy(arch, theta - h * dir), state);
    const MatrixXd dd = (jp - jm) / (2.0 * h);
    max_second = std::max(max_second, dd.jacobiSvd().singularValues()[0]);

    const VectorXd action = env.action_box.clamp(evaluate(policy, state));
    max_reward = std::max(max_reward, std::abs(env.reward(state, action)));
  }

  SmoothnessConstants consts;
  consts.G = opts.safety_factor * max_jac;
  consts.L = opts.safety_factor * max_second;
  consts.R = max_reward;
  consts.horizon = opts.horizon;
  consts.gamma = opts.gamma;
  return consts;
}

}  // namespace rlex
