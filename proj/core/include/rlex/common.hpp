#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace rlex {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Thrown when a configuration file or parameter set is malformed.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a persisted artifact violates one of its documented invariants.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of the index-th substream of a named stream.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return seed ^ splitmix64(index + 1);
}

// Deterministic random stream. All randomness in the toolkit flows through
// named streams derived from explicit seeds; real-valued draws use fixed
// bit-level mappings so results reproduce across standard library versions.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  static RngStream substream(std::uint64_t seed, std::uint64_t index) {
    return RngStream(substream_seed(seed, index));
  }

  std::uint64_t bits() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return bits() % n; }

  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Axis-aligned box in parameter or state space. Zero-width axes are legal
/// (pinned coordinates); negative widths are not.
struct Box {
  VectorXd lo;
  VectorXd hi;

  Box() = default;
  Box(VectorXd lo_, VectorXd hi_);
  static Box cube(int dim, double lo, double hi);

  int dim() const { return static_cast<int>(lo.size()); }
  double width(int axis) const { return hi[axis] - lo[axis]; }
  VectorXd widths() const { return hi - lo; }
  VectorXd center() const { return 0.5 * (lo + hi); }
  /// Half of the 2-norm diagonal.
  double radius() const { return 0.5 * (hi - lo).norm(); }
  bool contains(const VectorXd& x, double tol = 0.0) const;
  VectorXd clamp(const VectorXd& x) const;
  VectorXd sample(RngStream& rng) const;
  /// True if every axis has positive width.
  bool has_volume() const;
  Box inflated(double margin) const;
};

/// Number of worker threads used by parallel_for. 0 restores the default
/// (hardware concurrency, capped at 16).
void set_thread_count(int n);
int thread_count();

/// Runs fn(i) for i in [0, n). Deterministic: items are partitioned by index,
/// so results must be written to per-index slots.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

/// FNV-1a hash of a byte string, used for config fingerprints and
/// deterministic bounded noise.
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed = 1469598103934665603ull);

}  // namespace rlex
