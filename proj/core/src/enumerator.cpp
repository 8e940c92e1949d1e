#include "rlex/enumerator.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <vector>

namespace rlex {

void FeasibilityProblem::validate() const {
  if (surrogate == nullptr) throw std::invalid_argument("FeasibilityProblem: missing surrogate");
  const int l = surrogate->param_dim();
  if (e.size() != l) throw std::invalid_argument("FeasibilityProblem: budget dimension mismatch");
  if (box.dim() != l) throw std::invalid_argument("FeasibilityProblem: box dimension mismatch");
  for (Eigen::Index j = 0; j < e.size(); ++j) {
    if (e[j] < 0.0) throw std::invalid_argument("FeasibilityProblem: negative budget component");
  }
  if (!(b_sep > 0.0) && !exclusions.empty())
    throw std::invalid_argument("FeasibilityProblem: exclusions require b_sep > 0");
  for (const auto& x : exclusions) {
    if (x.size() != l)
      throw std::invalid_argument("FeasibilityProblem: exclusion dimension mismatch");
  }
}

void SolverConfig::validate() const {
  if (!(delta > 0.0)) throw std::invalid_argument("SolverConfig: delta must be positive");
  if (max_candidates < 1) throw std::invalid_argument("SolverConfig: max_candidates must be >= 1");
  if (max_boxes < 1) throw std::invalid_argument("SolverConfig: max_boxes must be >= 1");
  if (max_restarts < 1) throw std::invalid_argument("SolverConfig: max_restarts must be >= 1");
  if (descent_iters < 1) throw std::invalid_argument("SolverConfig: descent_iters must be >= 1");
}

std::string to_string(SolverConfig::Backend b) {
  return b == SolverConfig::Backend::interval_bnp ? "interval_bnp" : "multistart";
}

SolverConfig::Backend backend_from_string(const std::string& s) {
  if (s == "interval_bnp") return SolverConfig::Backend::interval_bnp;
  if (s == "multistart") return SolverConfig::Backend::multistart;
  throw std::invalid_argument("unknown solver backend: " + s);
}

namespace {

double min_exclusion_distance(const std::vector<VectorXd>& exclusions, const VectorXd& theta) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& x : exclusions) best = std::min(best, (theta - x).norm());
  return best;
}

// Pointwise check of the delta-relaxed constraint system.
bool feasible_within_delta(const FeasibilityProblem& p, const VectorXd& theta, double delta) {
  if (!p.box.contains(theta, 1e-12)) return false;
  const VectorXd values = p.surrogate->eval_all(theta);
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    if (std::abs(values[j]) > p.e[j] + delta) return false;
  }
  for (const auto& x : p.exclusions) {
    if ((theta - x).norm() < p.b_sep - delta) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Interval branch-and-prune backend.
//
// Boxes are pruned when the interval enclosure of some component excludes
// [-e_j, e_j] (every point violates the closed constraint) or when the box
// lies strictly inside an exclusion ball. Undecided boxes of radius below the
// stop radius are accepted at their midpoint, which the enclosure width
// guarantees to satisfy the delta-relaxed constraints. An empty queue without
// acceptance certifies unsatisfiability of the closed system.
// ---------------------------------------------------------------------------

struct IntervalSolver {
  const FeasibilityProblem& p;
  const SolverConfig& cfg;
  double stop_radius;

  IntervalSolver(const FeasibilityProblem& problem, const SolverConfig& config)
      : p(problem), cfg(config) {
    const VectorXd lip = problem.surrogate->lipschitz(problem.box);
    const double lip_max = lip.size() > 0 ? lip.maxCoeff() : 0.0;
    stop_radius = cfg.delta / (2.0 * std::max(1.0, lip_max));
  }

  SolveResult run() {
    SolveResult result;
    std::vector<Box> stack;
    stack.push_back(p.box);
    bool undecided_leftover = false;

    while (!stack.empty()) {
      if (result.stats.boxes_explored++ >= cfg.max_boxes) {
        result.status = SolveResult::Status::unknown;
        return result;
      }
      Box box = std::move(stack.back());
      stack.pop_back();

      // Constraint pruning via interval enclosure.
      VectorXd lo, hi;
      p.surrogate->enclosure(box, lo, hi);
      bool infeasible = false;
      for (Eigen::Index j = 0; j < lo.size(); ++j) {
        if (lo[j] > p.e[j] || hi[j] < -p.e[j]) {
          infeasible = true;
          break;
        }
      }
      if (infeasible) continue;

      // Exclusion pruning: the whole box inside an open separation ball.
      const double radius = box.radius();
      bool excluded = false;
      for (const auto& x : p.exclusions) {
        const double center_dist = (box.center() - x).norm();
        if (center_dist + radius < p.b_sep) {
          excluded = true;
          break;
        }
      }
      if (excluded) continue;

      if (radius <= stop_radius || radius <= cfg.delta * 0.5) {
        const VectorXd mid = box.center();
        if (feasible_within_delta(p, mid, cfg.delta)) {
          result.status = SolveResult::Status::found;
          result.theta = mid;
          return result;
        }
        undecided_leftover = true;  // enclosure said maybe, midpoint failed
        continue;
      }

      // Bisect the widest axis.
      int axis = 0;
      double w = -1.0;
      for (int d = 0; d < box.dim(); ++d) {
        if (box.width(d) > w) {
          w = box.width(d);
          axis = d;
        }
      }
      const double mid = 0.5 * (box.lo[axis] + box.hi[axis]);
      Box lower = box, upper = box;
      lower.hi[axis] = mid;
      upper.lo[axis] = mid;
      stack.push_back(std::move(upper));
      stack.push_back(std::move(lower));
    }

    result.status =
        undecided_leftover ? SolveResult::Status::unknown : SolveResult::Status::unsat;
    return result;
  }
};

// ---------------------------------------------------------------------------
// Verified multistart backend: Halton starts with a seeded random shift,
// projected subgradient descent on the constraint violation
//   F(theta) = max(max_j |ghat_j| - e_j, max_k (b_sep - ||theta - x_k||)),
// pointwise verification before accepting. Cannot certify unsat.
// ---------------------------------------------------------------------------

double halton(std::int64_t index, int base) {
  double f = 1.0, r = 0.0;
  std::int64_t i = index;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
                           53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113};

struct MultistartSolver {
  const FeasibilityProblem& p;
  const SolverConfig& cfg;

  double violation(const VectorXd& theta) const {
    const VectorXd values = p.surrogate->eval_all(theta);
    double f = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < values.size(); ++j)
      f = std::max(f, std::abs(values[j]) - p.e[j]);
    for (const auto& x : p.exclusions) f = std::max(f, p.b_sep - (theta - x).norm());
    return f;
  }

  // Subgradient of the active piece.
  VectorXd subgradient(const VectorXd& theta) const {
    const VectorXd values = p.surrogate->eval_all(theta);
    double f = -std::numeric_limits<double>::infinity();
    int best_j = -1;
    for (Eigen::Index j = 0; j < values.size(); ++j) {
      const double piece = std::abs(values[j]) - p.e[j];
      if (piece > f) {
        f = piece;
        best_j = static_cast<int>(j);
      }
    }
    int best_k = -1;
    for (std::size_t k = 0; k < p.exclusions.size(); ++k) {
      const double piece = p.b_sep - (theta - p.exclusions[k]).norm();
      if (piece > f) {
        f = piece;
        best_k = static_cast<int>(k);
      }
    }
    if (best_k >= 0) {
      const VectorXd diff = theta - p.exclusions[static_cast<std::size_t>(best_k)];
      const double n = diff.norm();
      if (n == 0.0) {
        // At the exclusion centre every direction improves; pick a fixed one.
        VectorXd g = VectorXd::Zero(theta.size());
        g[0] = -1.0;
        return g;
      }
      return -diff / n;
    }
    const double sign = values[best_j] >= 0.0 ? 1.0 : -1.0;
    return sign * p.surrogate->gradient(best_j, theta);
  }

  SolveResult run() {
    SolveResult result;
    RngStream shift_rng(cfg.seed);
    VectorXd shift(p.box.dim());
    for (int d = 0; d < p.box.dim(); ++d) shift[d] = shift_rng.uniform();

    const double base_step = std::max(cfg.delta, 0.25 * p.box.widths().maxCoeff());
    std::int64_t start_index = static_cast<std::int64_t>(p.exclusions.size()) + 1;
    for (int attempt = 0; attempt < cfg.max_restarts; ++attempt, ++start_index) {
      ++result.stats.restarts;
      VectorXd theta(p.box.dim());
      for (int d = 0; d < p.box.dim(); ++d) {
        const double u =
            std::fmod(halton(start_index, kPrimes[d % std::size(kPrimes)]) + shift[d], 1.0);
        theta[d] = p.box.lo[d] + p.box.width(d) * u;
      }

      double f = violation(theta);
      double step = base_step;
      for (int it = 0; it < cfg.descent_iters && f > -0.5 * cfg.delta; ++it) {
        const VectorXd g = subgradient(theta);
        const double gn = g.norm();
        if (gn == 0.0) break;
        bool improved = false;
        while (step > 1e-14 * base_step) {
          const VectorXd trial = p.box.clamp(theta - (step / gn) * g);
          const double ft = violation(trial);
          if (ft < f) {
            theta = trial;
            f = ft;
            improved = true;
            step *= 1.5;
            break;
          }
          step *= 0.5;
        }
        if (!improved) break;
      }

      if (feasible_within_delta(p, theta, cfg.delta)) {
        result.status = SolveResult::Status::found;
        result.theta = theta;
        return result;
      }
    }
    result.status = SolveResult::Status::unknown;
    return result;
  }
};

}  // namespace

SolveResult solve_once(const FeasibilityProblem& problem, const SolverConfig& cfg) {
  problem.validate();
  cfg.validate();
  if (cfg.backend == SolverConfig::Backend::interval_bnp) {
    IntervalSolver solver(problem, cfg);
    return solver.run();
  }
  MultistartSolver solver{problem, cfg};
  return solver.run();
}

CandidateSet enumerate_candidates(const Surrogate& surrogate, const VectorXd& e, const Box& box,
                                  double b_sep, const SolverConfig& cfg) {
  if (!(b_sep > 0.0)) throw std::invalid_argument("enumerate_candidates: b_sep must be positive");
  cfg.validate();
  const double min_e = e.size() > 0 ? e.minCoeff() : 0.0;
  if (min_e > 0.0 && cfg.delta > 0.1 * min_e) {
    // Tolerance comparable to the budget makes Found answers vacuous.
    std::cerr << "enumerate_candidates: warning: delta = " << cfg.delta
              << " is not small against min_j e_j = " << min_e << "\n";
  }

  CandidateSet out;
  out.b_sep = b_sep;
  out.delta = cfg.delta;
  out.backend = to_string(cfg.backend);

  FeasibilityProblem problem;
  problem.surrogate = &surrogate;
  problem.e = e;
  problem.box = box;
  problem.b_sep = b_sep;

  while (true) {
    if (static_cast<int>(out.candidates.size()) >= cfg.max_candidates) {
      out.termination = CandidateSet::Termination::budget_exceeded;
      out.certified_exhausted = false;
      break;
    }
    const SolveResult res = solve_once(problem, cfg);
    ++out.solve_calls;
    out.totals.boxes_explored += res.stats.boxes_explored;
    out.totals.restarts += res.stats.restarts;

    if (res.status == SolveResult::Status::found) {
      Candidate cand;
      cand.theta = res.theta;
      const VectorXd values = surrogate.eval_all(res.theta);
      double residual = 0.0;
      for (Eigen::Index j = 0; j < values.size(); ++j)
        residual = std::max(residual, std::abs(values[j]) / std::max(e[j], 1e-300));
      cand.residual = residual;
      cand.min_prior_dist = min_exclusion_distance(problem.exclusions, res.theta);
      out.candidates.push_back(cand);
      problem.exclusions.push_back(res.theta);
      continue;
    }
    if (res.status == SolveResult::Status::unsat) {
      out.termination = CandidateSet::Termination::exhausted;
      out.certified_exhausted = true;
    } else if (cfg.backend == SolverConfig::Backend::multistart) {
      // Restart budget dried up: the multistart notion of exhaustion,
      // explicitly uncertified.
      out.termination = CandidateSet::Termination::exhausted;
      out.certified_exhausted = false;
    } else {
      out.termination = CandidateSet::Termination::budget_exceeded;
      out.certified_exhausted = false;
    }
    break;
  }
  return out;
}

Coverage verify_coverage(const CandidateSet& candidates, const VectorXd& theta_true) {
  Coverage cov;
  cov.min_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.candidates.size(); ++i) {
    const double d = (candidates.candidates[i].theta - theta_true).norm();
    if (d < cov.min_dist) {
      cov.min_dist = d;
      cov.nearest = static_cast<int>(i);
    }
  }
  cov.covered = cov.min_dist <= candidates.b_sep;
  return cov;
}

}  // namespace rlex
