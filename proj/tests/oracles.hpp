#pragma once

// Independent test oracles. These deliberately re-derive quantities through
// a different route than the library code they check.

#include "rlex/envsim.hpp"

#include <cmath>
#include <vector>

namespace rlex::test {

/// Local maxima of an analytic objective: dense grid scan (value above all
/// neighbours) followed by gradient-ascent polish with the analytic gradient.
inline std::vector<VectorXd> locate_maxima(const AnalyticObjective& obj, double resolution) {
  const Box& box = obj.domain;
  const int d = obj.dim;
  std::vector<int> counts(static_cast<std::size_t>(d));
  std::int64_t total = 1;
  for (int a = 0; a < d; ++a) {
    counts[static_cast<std::size_t>(a)] =
        std::max(2, static_cast<int>(std::floor(box.width(a) / resolution)) + 1);
    total *= counts[static_cast<std::size_t>(a)];
  }
  auto point_at = [&](std::int64_t index) {
    VectorXd x(d);
    for (int a = d - 1; a >= 0; --a) {
      const int n = counts[static_cast<std::size_t>(a)];
      const int coord = static_cast<int>(index % n);
      index /= n;
      x[a] = box.lo[a] + box.width(a) * coord / (n - 1);
    }
    return x;
  };

  std::vector<VectorXd> maxima;
  for (std::int64_t i = 0; i < total; ++i) {
    const VectorXd x = point_at(i);
    const double v = obj.value(x);
    // Neighbour comparison along each axis (interior points only).
    bool is_peak = true;
    std::int64_t stride = 1;
    for (int a = d - 1; a >= 0 && is_peak; --a) {
      const int n = counts[static_cast<std::size_t>(a)];
      const int coord = static_cast<int>((i / stride) % n);
      if (coord == 0 || coord == n - 1) {
        is_peak = false;
        break;
      }
      if (obj.value(point_at(i - stride)) >= v || obj.value(point_at(i + stride)) >= v)
        is_peak = false;
      stride *= n;
    }
    if (!is_peak) continue;

    // Polish by gradient ascent.
    VectorXd y = x;
    double step = resolution;
    for (int it = 0; it < 2000; ++it) {
      const VectorXd g = obj.gradient(y);
      if (g.norm() < 1e-13) break;
      VectorXd trial = y + step * g;
      if (obj.value(trial) > obj.value(y)) {
        y = trial;
        step *= 1.25;
      } else {
        step *= 0.5;
        if (step < 1e-15) break;
      }
    }
    // Deduplicate.
    bool fresh = true;
    for (const auto& m : maxima)
      if ((m - y).norm() < 10.0 * resolution) fresh = false;
    if (fresh) maxima.push_back(y);
  }
  return maxima;
}

/// Hand-rolled Euler integration of the pendulum preset's derivative field.
inline VectorXd pendulum_euler_step(const VectorXd& s, double u, double mass, double length,
                                    double gravity, double dt) {
  VectorXd next(3);
  next[0] = s[0] + dt * (-s[1]);
  next[1] = s[1] + dt * (s[0]);
  next[2] = s[2] + dt * ((3.0 * gravity / (2.0 * length)) * s[1] + (3.0 / (mass * length * length)) * u);
  if (next[2] > 8.0) next[2] = 8.0;
  if (next[2] < -8.0) next[2] = -8.0;
  return next;
}

inline double pendulum_reward_oracle(const VectorXd& s, double u) {
  const double beta = std::atan2(s[1], s[0]);
  return -(beta * beta + 0.1 * s[2] * s[2] + 0.001 * u * u);
}

}  // namespace rlex::test
