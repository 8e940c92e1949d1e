#include "rlex/envsim.hpp"
#include "rlex/objective.hpp"
#include "rlex/policy.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace rlex;

namespace {

AnalyticObjective double_well_1d() {
  AnalyticObjective obj;
  obj.dim = 1;
  obj.domain = Box::cube(1, -2.0, 2.0);
  // -(t^2 - 1)^2 = -t^4 + 2 t^2 - 1
  obj.poly = {{-1.0, {4}}, {2.0, {2}}, {-1.0, {0}}};
  return obj;
}

VectorXd vec3(double a, double b, double c) {
  VectorXd v(3);
  v << a, b, c;
  return v;
}

}  // namespace

TEST_CASE("pendulum derivative matches the published state-space matrix") {
  const double dt = 0.05;
  const Environment env = pendulum_env(1.0, 1.0, 10.0, dt, 0.0);
  RngStream rng(0);
  VectorXd u = VectorXd::Zero(1);

  // At (1, 0, 0) with u = 0 the derivative is (0, 1, 0).
  VectorXd next = env.step(vec3(1, 0, 0), u, rng);
  VectorXd deriv = (next - vec3(1, 0, 0)) / dt;
  CHECK(deriv[0] == doctest::Approx(0.0));
  CHECK(deriv[1] == doctest::Approx(1.0));
  CHECK(deriv[2] == doctest::Approx(0.0));

  // The gravity gain 3*gr/(2*l) shows at (0, 1, 0): dbdot = 15.
  next = env.step(vec3(0, 1, 0), u, rng);
  deriv = (next - vec3(0, 1, 0)) / dt;
  CHECK(deriv[2] == doctest::Approx(15.0));

  // Torque gain 3/(m*l^2).
  u[0] = 2.0;
  next = env.step(vec3(1, 0, 0), u, rng);
  deriv = (next - vec3(1, 0, 0)) / dt;
  CHECK(deriv[2] == doctest::Approx(6.0));
}

TEST_CASE("pendulum reward") {
  const Environment env = pendulum_env();
  VectorXd u = VectorXd::Zero(1);
  CHECK(env.reward(vec3(1, 0, 0), u) == 0.0);  // upright, still, no torque

  u[0] = 1.0;
  const double r = env.reward(vec3(std::cos(0.2), std::sin(0.2), 0.5), u);
  CHECK(r == doctest::Approx(-(0.04 + 0.1 * 0.25 + 0.001)));
  CHECK(std::abs(r) <= env.reward_bound);
}

TEST_CASE("pendulum rejects non-positive physical parameters") {
  CHECK_THROWS_AS(pendulum_env(0.0, 1.0, 10.0, 0.05, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(pendulum_env(1.0, -1.0, 10.0, 0.05, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(pendulum_env(1.0, 1.0, 10.0, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(pendulum_env(1.0, 1.0, 10.0, 0.05, -0.1), std::invalid_argument);
}

TEST_CASE("mountain car derivative and reward") {
  const double dt = 1.0;
  const Environment env = mountain_car_env(dt, 0.45, 0.0);
  RngStream rng(0);
  VectorXd s(2), u(1);

  s << 0.0, 0.0;
  u << 0.0;
  VectorXd next = env.step(s, u, rng);
  CHECK((next[1] - 0.0) / dt == doctest::Approx(-0.0025));

  u << 1.0;
  next = env.step(s, u, rng);
  CHECK((next[1] - 0.0) / dt == doctest::Approx(-0.0015));

  u << 2.0;
  CHECK(env.reward(s, u) == doctest::Approx(-0.4));
  s << 0.5, 0.0;  // past the goal
  CHECK(env.reward(s, u) == doctest::Approx(100.0));
  CHECK(env.terminal(s));
}

TEST_CASE("mountain car walls are inelastic") {
  const Environment env = mountain_car_env(1.0, 0.45, 0.0);
  RngStream rng(0);
  VectorXd s(2), u(1);
  s << -1.19, -0.07;
  u << -1.0;
  const VectorXd next = env.step(s, u, rng);
  CHECK(next[0] == -1.2);
  CHECK(next[1] == 0.0);
}

TEST_CASE("synthetic landscapes evaluate their descriptor") {
  AnalyticObjective obj = double_well_1d();
  const Environment env = synthetic_env(obj);
  CHECK(env.state_dim == 1);
  CHECK(env.action_dim == 1);
  CHECK(env.deterministic());

  RngStream rng(0);
  const VectorXd s0 = env.initial_state(rng);
  CHECK(s0.norm() == 0.0);
  VectorXd a(1);
  a << 1.0;
  CHECK(env.reward(s0, a) == doctest::Approx(obj.value(a)));
  a << 0.37;
  CHECK(env.reward(s0, a) == obj.value(a));
}

TEST_CASE("double well has maxima exactly at +-1") {
  AnalyticObjective obj = double_well_1d();
  VectorXd x(1);
  x << 1.0;
  CHECK(obj.value(x) == doctest::Approx(0.0));
  CHECK(obj.gradient(x)[0] == doctest::Approx(0.0));
  x << -1.0;
  CHECK(obj.value(x) == doctest::Approx(0.0));
  CHECK(obj.gradient(x)[0] == doctest::Approx(0.0));
  x << 0.5;
  CHECK(obj.value(x) < 0.0);

  const auto maxima = test::locate_maxima(obj, 1e-3);
  REQUIRE(maxima.size() == 2);
  CHECK(std::abs(std::abs(maxima[0][0]) - 1.0) < 1e-6);
  CHECK(std::abs(std::abs(maxima[1][0]) - 1.0) < 1e-6);
}

TEST_CASE("quadratic bowl has a unique maximum at the origin") {
  AnalyticObjective obj;
  obj.dim = 2;
  obj.domain = Box::cube(2, -1.0, 1.0);
  obj.poly = {{-1.0, {2, 0}}, {-1.0, {0, 2}}};
  const auto maxima = test::locate_maxima(obj, 5e-3);
  REQUIRE(maxima.size() == 1);
  CHECK(maxima[0].norm() < 1e-8);
}

TEST_CASE("three gaussian bumps are located by the dense-grid oracle") {
  AnalyticObjective obj;
  obj.dim = 1;
  obj.domain = Box::cube(1, -2.5, 2.5);
  VectorXd c1(1), c2(1), c3(1);
  c1 << -1.5;
  c2 << 0.0;
  c3 << 1.5;
  obj.gaussians = {{1.0, c1, 0.3}, {0.8, c2, 0.3}, {1.1, c3, 0.3}};
  const auto maxima = test::locate_maxima(obj, 1e-3);
  REQUIRE(maxima.size() == 3);
  for (const auto& m : maxima) {
    const double nearest =
        std::min({std::abs(m[0] + 1.5), std::abs(m[0] - 0.0), std::abs(m[0] - 1.5)});
    CHECK(nearest < 1e-3);
  }
}

TEST_CASE("descriptor validation rejects malformed input") {
  AnalyticObjective obj;
  obj.dim = 2;
  obj.domain = Box::cube(2, -1.0, 1.0);
  obj.poly = {{1.0, {1}}};  // wrong arity
  CHECK_THROWS_AS(obj.validate(), std::invalid_argument);

  obj.poly.clear();
  VectorXd c(2);
  c << 0.0, 0.0;
  obj.gaussians = {{1.0, c, -0.5}};  // bad sigma
  CHECK_THROWS_AS(obj.validate(), std::invalid_argument);
}

TEST_CASE("rollout discounting") {
  // Constant reward 1: descriptor J = 1 regardless of the action.
  AnalyticObjective obj;
  obj.dim = 1;
  obj.domain = Box::cube(1, -1.0, 1.0);
  obj.poly = {{1.0, {0}}};
  const Environment env = synthetic_env(obj);
  const PolicyParams policy = make_policy(Architecture::constant(1, 1), VectorXd::Zero(1));

  CHECK(rollout(env, policy, 0, 0.0, 1) == doctest::Approx(1.0));
  CHECK(rollout(env, policy, 7, 0.0, 1) == doctest::Approx(1.0));
  CHECK(rollout(env, policy, 2, 0.5, 1) == doctest::Approx(1.75));
}

TEST_CASE("pendulum rollout matches a hand Euler simulation") {
  const double dt = 0.05, gamma = 0.9;
  const Environment env = pendulum_env(1.0, 1.0, 10.0, dt, 0.0);
  const Architecture arch = Architecture::net(3, {1, 2, 1}, Activation::tanh_scaled, 2.0);
  const PolicyParams zero_policy = make_policy(arch, VectorXd::Zero(arch.param_count()));

  const std::uint64_t seed = 1234;
  // Replicate the seeded initial draw, then integrate by hand (u = 0).
  RngStream rng(seed);
  VectorXd s = env.initial_state(rng);
  double expected = 0.0, w = 1.0;
  for (int k = 0; k <= 3; ++k) {
    expected += w * test::pendulum_reward_oracle(s, 0.0);
    w *= gamma;
    s = test::pendulum_euler_step(s, 0.0, 1.0, 1.0, 10.0, dt);
  }
  CHECK(rollout(env, zero_policy, 3, gamma, seed) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("rollouts are deterministic given the seed") {
  const Environment env = pendulum_env(1.0, 1.0, 10.0, 0.05, 0.1);
  const Architecture arch = Architecture::net(3, {1, 2, 1}, Activation::tanh_scaled, 2.0);
  RngStream rng(5);
  VectorXd theta(arch.param_count());
  for (int i = 0; i < theta.size(); ++i) theta[i] = rng.uniform(-1.0, 1.0);
  const PolicyParams policy = make_policy(arch, theta);

  const double a = rollout(env, policy, 50, 0.9, 42);
  const double b = rollout(env, policy, 50, 0.9, 42);
  CHECK(a == b);  // bit-exact
  const double c = rollout(env, policy, 50, 0.9, 43);
  CHECK(a != c);
}

TEST_CASE("noise-free presets match the ODE-Euler oracle per step") {
  const double dt = 0.05;
  const Environment env = pendulum_env(2.0, 0.7, 9.81, dt, 0.0);
  const Architecture arch = Architecture::net(3, {2, 1}, Activation::tanh_scaled, 2.0);
  RngStream rng(9);
  VectorXd theta(arch.param_count());
  for (int i = 0; i < theta.size(); ++i) theta[i] = rng.uniform(-0.5, 0.5);
  const PolicyParams policy = make_policy(arch, theta);

  const Trajectory traj = simulate(env, policy, 40, 777);
  RngStream rng2(777);
  VectorXd s = env.initial_state(rng2);
  for (std::size_t k = 0; k < traj.length(); ++k) {
    CHECK((traj.states[k] - s).lpNorm<Eigen::Infinity>() <= 1e-12);
    const double u = traj.actions[k][0];
    s = test::pendulum_euler_step(s, u, 2.0, 0.7, 9.81, dt);
  }
}

TEST_CASE("rewards stay within the preset bound") {
  for (const Environment& env : {pendulum_env(), mountain_car_env()}) {
    RngStream rng(31);
    for (int i = 0; i < 2000; ++i) {
      const VectorXd s = env.state_box.sample(rng);
      const VectorXd a = env.action_box.sample(rng);
      CHECK(std::abs(env.reward(s, a)) <= env.reward_bound);
    }
  }
}

TEST_CASE("synthetic induced objective equals the descriptor at random points") {
  AnalyticObjective obj;
  obj.dim = 2;
  obj.domain = Box::cube(2, -1.5, 1.5);
  obj.poly = {{-1.0, {2, 0}}, {-0.5, {0, 2}}, {0.3, {1, 1}}};
  VectorXd c(2);
  c << 0.4, -0.2;
  obj.gaussians = {{0.7, c, 0.6}};

  const Environment env = synthetic_env(obj);
  const ObjectiveEvaluator ev =
      make_evaluator(env, Architecture::constant(2, 2), 0, 0.0, 1, 2024);

  RngStream rng(77);
  for (int i = 0; i < 1000; ++i) {
    const VectorXd theta = obj.domain.sample(rng);
    CHECK(std::abs(evaluate_jbar(ev, theta) - obj.value(theta)) <= 1e-10);
  }
}

TEST_CASE("horizon zero returns the single-step reward at the initial state") {
  const Environment env = mountain_car_env(1.0, 0.45, 0.0);
  const Architecture arch = Architecture::constant(2, 1);
  VectorXd theta(1);
  theta << 0.5;
  const double r = rollout(env, make_policy(arch, theta), 0, 0.9, 3);
  CHECK(r == doctest::Approx(-0.1 * 0.25));
}

TEST_CASE("mountain car terminal state ends the episode with the bonus") {
  const Architecture arch = Architecture::constant(2, 1);
  const PolicyParams policy = make_policy(arch, VectorXd::Zero(1));

  // Goal below every start: terminal immediately, single +100 reward.
  const Environment reached = mountain_car_env(1.0, -0.7, 0.0);
  const Trajectory t1 = simulate(reached, policy, 10, 4);
  CHECK(t1.length() == 1);
  CHECK(t1.rewards.front() == doctest::Approx(100.0));

  // Goal unreachable with zero force: full horizon, zero action cost.
  const Environment unreached = mountain_car_env(1.0, 0.45, 0.0);
  const Trajectory t2 = simulate(unreached, policy, 10, 4);
  CHECK(t2.length() == 11);
  for (double r : t2.rewards) CHECK(r == 0.0);
}
