#include "rlex/common.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>
#include <vector>

namespace rlex {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double mag = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * M_PI * u2;
  spare_ = mag * std::sin(ang);
  has_spare_ = true;
  return mag * std::cos(ang);
}

Box::Box(VectorXd lo_, VectorXd hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size()) throw std::invalid_argument("Box: lo/hi dimension mismatch");
  for (int i = 0; i < dim(); ++i) {
    if (!(lo[i] <= hi[i])) throw std::invalid_argument("Box: lo > hi on axis " + std::to_string(i));
  }
}

Box Box::cube(int dim, double lo, double hi) {
  return Box(VectorXd::Constant(dim, lo), VectorXd::Constant(dim, hi));
}

bool Box::contains(const VectorXd& x, double tol) const {
  if (x.size() != lo.size()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
  }
  return true;
}

VectorXd Box::clamp(const VectorXd& x) const {
  return x.cwiseMax(lo).cwiseMin(hi);
}

VectorXd Box::sample(RngStream& rng) const {
  VectorXd x(dim());
  for (int i = 0; i < dim(); ++i) x[i] = rng.uniform(lo[i], hi[i]);
  return x;
}

bool Box::has_volume() const {
  for (int i = 0; i < dim(); ++i) {
    if (!(hi[i] > lo[i])) return false;
  }
  return dim() > 0;
}

Box Box::inflated(double margin) const {
  return Box(lo.array() - margin, hi.array() + margin);
}

namespace {
int g_threads = 0;
thread_local bool g_inside_worker = false;
}

void set_thread_count(int n) { g_threads = n < 0 ? 0 : n; }

int thread_count() {
  if (g_threads > 0) return g_threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min<unsigned>(hw == 0 ? 1 : hw, 16));
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn) {
  const int workers = thread_count();
  if (n <= 0) return;
  // Nested calls run sequentially: the outer loop already owns the workers.
  if (g_inside_worker || workers <= 1 || n < 64) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const int used = static_cast<int>(std::min<std::int64_t>(workers, n));
  std::vector<std::thread> pool;
  pool.reserve(used);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < used; ++t) {
    pool.emplace_back([&, t]() {
      g_inside_worker = true;
      const std::int64_t chunk = (n + used - 1) / used;
      const std::int64_t begin = t * chunk;
      const std::int64_t end = std::min<std::int64_t>(n, begin + chunk);
      try {
        for (std::int64_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace rlex
