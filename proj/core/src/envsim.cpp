#include "rlex/envsim.hpp"

#include "rlex/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rlex {

void AnalyticObjective::validate() const {
  if (dim < 1) throw std::invalid_argument("AnalyticObjective: dim must be >= 1");
  if (domain.dim() != dim) throw std::invalid_argument("AnalyticObjective: domain dimension mismatch");
  for (const auto& t : poly) {
    if (static_cast<int>(t.exponents.size()) != dim)
      throw std::invalid_argument("AnalyticObjective: polynomial term exponent arity mismatch");
    for (int e : t.exponents) {
      if (e < 0) throw std::invalid_argument("AnalyticObjective: negative exponent");
    }
  }
  for (const auto& g : gaussians) {
    if (g.center.size() != dim) throw std::invalid_argument("AnalyticObjective: gaussian center dimension mismatch");
    if (!(g.sigma > 0.0)) throw std::invalid_argument("AnalyticObjective: gaussian sigma must be positive");
  }
}

double AnalyticObjective::value(const VectorXd& x) const {
  double v = 0.0;
  for (const auto& t : poly) {
    double term = t.coef;
    for (int d = 0; d < dim; ++d) {
      for (int e = 0; e < t.exponents[d]; ++e) term *= x[d];
    }
    v += term;
  }
  for (const auto& g : gaussians) {
    const double d2 = (x - g.center).squaredNorm();
    v += g.amp * std::exp(-d2 / (2.0 * g.sigma * g.sigma));
  }
  return v;
}

VectorXd AnalyticObjective::gradient(const VectorXd& x) const {
  VectorXd grad = VectorXd::Zero(dim);
  for (const auto& t : poly) {
    for (int d = 0; d < dim; ++d) {
      const int e = t.exponents[d];
      if (e == 0) continue;
      double term = t.coef * e;
      for (int k = 0; k < e - 1; ++k) term *= x[d];
      for (int o = 0; o < dim; ++o) {
        if (o == d) continue;
        for (int k = 0; k < t.exponents[o]; ++k) term *= x[o];
      }
      grad[d] += term;
    }
  }
  for (const auto& g : gaussians) {
    const VectorXd diff = x - g.center;
    const double s2 = g.sigma * g.sigma;
    const double w = g.amp * std::exp(-diff.squaredNorm() / (2.0 * s2));
    grad -= (w / s2) * diff;
  }
  return grad;
}

double AnalyticObjective::magnitude_bound() const {
  // Coarse but sound: sum of term magnitudes at the corner of largest
  // absolute coordinates, domain inflated by one unit of slack for the
  // finite-difference probes that step just outside the box.
  const Box dom = domain.inflated(0.5);
  double bound = 0.0;
  for (const auto& t : poly) {
    double term = std::abs(t.coef);
    for (int d = 0; d < dim; ++d) {
      const double m = std::max(std::abs(dom.lo[d]), std::abs(dom.hi[d]));
      for (int e = 0; e < t.exponents[d]; ++e) term *= m;
    }
    bound += term;
  }
  for (const auto& g : gaussians) bound += std::abs(g.amp);
  return bound;
}

namespace {

constexpr double kPendulumMaxSpeed = 8.0;
constexpr double kPendulumMaxTorque = 2.0;
constexpr double kCarMinPosition = -1.2;
constexpr double kCarMaxPosition = 0.6;
constexpr double kCarMaxSpeed = 0.07;
constexpr double kCarMaxForce = 1.0;

void check_positive(double v, const char* name) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
}

}  // namespace

Environment pendulum_env(double mass, double length, double gravity, double dt,
                         double noise_scale) {
  check_positive(mass, "mass");
  check_positive(length, "length");
  check_positive(gravity, "gravity");
  check_positive(dt, "dt");
  if (noise_scale < 0.0) throw std::invalid_argument("noise_scale must be non-negative");

  Environment env;
  env.name = "pendulum";
  env.state_dim = 3;
  env.action_dim = 1;
  env.process_noise_scale = noise_scale;
  env.integration_step = dt;
  env.stochastic_init = true;
  env.action_box = Box::cube(1, -kPendulumMaxTorque, kPendulumMaxTorque);
  {
    VectorXd lo(3), hi(3);
    lo << -1.0, -1.0, -kPendulumMaxSpeed;
    hi << 1.0, 1.0, kPendulumMaxSpeed;
    env.state_box = Box(lo, hi);
  }
  env.reward_bound = M_PI * M_PI + 0.1 * kPendulumMaxSpeed * kPendulumMaxSpeed +
                     0.001 * kPendulumMaxTorque * kPendulumMaxTorque;

  const double gain_g = 3.0 * gravity / (2.0 * length);
  const double gain_u = 3.0 / (mass * length * length);
  env.step = [dt, gain_g, gain_u, noise_scale](const VectorXd& s, const VectorXd& a,
                                               RngStream& rng) {
    VectorXd next(3);
    next[0] = s[0] + dt * (-s[1]);
    next[1] = s[1] + dt * (s[0]);
    next[2] = s[2] + dt * (gain_g * s[1] + gain_u * a[0]);
    if (noise_scale > 0.0) next[2] += noise_scale * rng.normal();
    next[2] = std::clamp(next[2], -kPendulumMaxSpeed, kPendulumMaxSpeed);
    return next;
  };
  env.reward = [](const VectorXd& s, const VectorXd& a) {
    const double beta = std::atan2(s[1], s[0]);
    return -(beta * beta + 0.1 * s[2] * s[2] + 0.001 * a[0] * a[0]);
  };
  env.initial_state = [](RngStream& rng) {
    const double beta = rng.uniform(-M_PI, M_PI);
    const double bdot = rng.uniform(-1.0, 1.0);
    VectorXd s(3);
    s << std::cos(beta), std::sin(beta), bdot;
    return s;
  };
  return env;
}

Environment mountain_car_env(double dt, double goal_position, double noise_scale) {
  check_positive(dt, "dt");
  if (noise_scale < 0.0) throw std::invalid_argument("noise_scale must be non-negative");

  Environment env;
  env.name = "mountain_car";
  env.state_dim = 2;
  env.action_dim = 1;
  env.process_noise_scale = noise_scale;
  env.integration_step = dt;
  env.stochastic_init = true;
  env.action_box = Box::cube(1, -kCarMaxForce, kCarMaxForce);
  {
    VectorXd lo(2), hi(2);
    lo << kCarMinPosition, -kCarMaxSpeed;
    hi << kCarMaxPosition, kCarMaxSpeed;
    env.state_box = Box(lo, hi);
  }
  env.reward_bound = 100.0;

  env.step = [dt, noise_scale](const VectorXd& s, const VectorXd& a, RngStream& rng) {
    const double p = s[0], v = s[1];
    double p_next = p + dt * v;
    double v_next = v + dt * (0.001 * a[0] - 0.0025 * std::cos(3.0 * p) -
                              0.0025 * v * v * std::sin(3.0 * p));
    if (noise_scale > 0.0) v_next += noise_scale * rng.normal();
    v_next = std::clamp(v_next, -kCarMaxSpeed, kCarMaxSpeed);
    if (p_next <= kCarMinPosition) {
      p_next = kCarMinPosition;
      v_next = 0.0;
    } else if (p_next >= kCarMaxPosition) {
      p_next = kCarMaxPosition;
      v_next = 0.0;
    }
    VectorXd next(2);
    next << p_next, v_next;
    return next;
  };
  env.reward = [goal_position](const VectorXd& s, const VectorXd& a) {
    if (s[0] >= goal_position) return 100.0;
    return -0.1 * a[0] * a[0];
  };
  env.terminal = [goal_position](const VectorXd& s) { return s[0] >= goal_position; };
  env.initial_state = [](RngStream& rng) {
    VectorXd s(2);
    s << rng.uniform(-0.6, -0.4), 0.0;
    return s;
  };
  return env;
}

Environment synthetic_env(const AnalyticObjective& objective) {
  objective.validate();

  Environment env;
  env.name = "synthetic";
  env.state_dim = objective.dim;
  env.action_dim = objective.dim;
  env.process_noise_scale = 0.0;
  env.integration_step = 1.0;
  env.stochastic_init = false;
  const double inf = std::numeric_limits<double>::infinity();
  env.action_box = Box::cube(objective.dim, -inf, inf);
  env.state_box = objective.domain;
  env.reward_bound = objective.magnitude_bound();

  AnalyticObjective obj = objective;
  env.step = [](const VectorXd& s, const VectorXd&, RngStream&) { return s; };
  env.reward = [obj](const VectorXd&, const VectorXd& a) { return obj.value(a); };
  const int d = objective.dim;
  env.initial_state = [d](RngStream&) { return VectorXd(VectorXd::Zero(d)); };
  env.analytic = std::move(obj);
  return env;
}

Trajectory simulate(const Environment& env, const PolicyParams& policy, int horizon,
                    std::uint64_t seed) {
  if (horizon < 0) throw std::invalid_argument("horizon must be non-negative");
  if (policy.arch.action_dim() != env.action_dim)
    throw std::invalid_argument("policy action dimension does not match environment");

  RngStream rng(seed);
  Trajectory traj;
  traj.states.reserve(static_cast<std::size_t>(horizon) + 1);
  VectorXd state = env.initial_state(rng);
  for (int k = 0; k <= horizon; ++k) {
    const VectorXd action = env.action_box.clamp(evaluate(policy, state));
    traj.states.push_back(state);
    traj.actions.push_back(action);
    traj.rewards.push_back(env.reward(state, action));
    if (env.terminal && env.terminal(state)) break;
    if (k < horizon) state = env.step(state, action, rng);
  }
  return traj;
}

double rollout(const Environment& env, const PolicyParams& policy, int horizon,
               double discount, std::uint64_t seed) {
  if (!(discount >= 0.0 && discount < 1.0))
    throw std::invalid_argument("discount must lie in [0, 1)");
  const Trajectory traj = simulate(env, policy, horizon, seed);
  double total = 0.0;
  double weight = 1.0;
  for (double r : traj.rewards) {
    total += weight * r;
    weight *= discount;
  }
  return total;
}

}  // namespace rlex
