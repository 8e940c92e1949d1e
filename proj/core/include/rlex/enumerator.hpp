#pragma once

#include "rlex/common.hpp"
#include "rlex/surrogate.hpp"

#include <string>
#include <vector>

namespace rlex {

/// One instance of the candidate-search feasibility problem: find theta in
/// box with |ghat_j(theta)| <= e_j for every component and distance at least
/// b_sep from every exclusion point.
struct FeasibilityProblem {
  const Surrogate* surrogate = nullptr;
  VectorXd e;         // component-wise error budget
  Box box;
  double b_sep = 0.0;
  std::vector<VectorXd> exclusions;

  void validate() const;
};

struct SolverConfig {
  enum class Backend { interval_bnp, multistart };

  Backend backend = Backend::interval_bnp;
  double delta = 1e-3;             // numeric tolerance of Found answers
  int max_candidates = 50000;
  std::int64_t max_boxes = 2000000;  // interval backend work limit per solve
  int max_restarts = 200;            // multistart: consecutive failed starts
  int descent_iters = 400;
  std::uint64_t seed = 0;

  void validate() const;
};

std::string to_string(SolverConfig::Backend b);
SolverConfig::Backend backend_from_string(const std::string& s);

struct SolveStats {
  std::int64_t boxes_explored = 0;
  std::int64_t restarts = 0;
};

/// found: theta satisfies every constraint within delta.
/// unsat: certified (interval backend only) - no point of the box satisfies
///        the strict constraints.
/// unknown: work limit hit without a verdict.
struct SolveResult {
  enum class Status { found, unsat, unknown };
  Status status = Status::unknown;
  VectorXd theta;
  SolveStats stats;
};

SolveResult solve_once(const FeasibilityProblem& problem, const SolverConfig& cfg);

struct Candidate {
  VectorXd theta;
  double residual = 0.0;        // max_j |ghat_j| / e_j
  double min_prior_dist = 0.0;  // infinity for the first candidate
};

struct CandidateSet {
  std::vector<Candidate> candidates;
  enum class Termination { exhausted, budget_exceeded } termination = Termination::exhausted;
  /// True only when the interval backend certified unsatisfiability of the
  /// final feasibility query; the coverage guarantee requires this.
  bool certified_exhausted = false;
  double b_sep = 0.0;
  double delta = 0.0;
  std::string backend;
  SolveStats totals;
  int solve_calls = 0;

  std::size_t size() const { return candidates.size(); }
};

/// Iterates solve_once, adding each found point to the exclusion list, until
/// the solver reports unsat/unknown or max_candidates is reached. The
/// separation constraint is a conjunction over all prior candidates.
CandidateSet enumerate_candidates(const Surrogate& surrogate, const VectorXd& e, const Box& box,
                                  double b_sep, const SolverConfig& cfg);

struct Coverage {
  bool covered = false;
  double min_dist = 0.0;
  int nearest = -1;
};

/// Distance from the ground-truth parameters to the candidate set (test
/// harness use only; covered means min_dist <= b_sep, inclusive).
Coverage verify_coverage(const CandidateSet& candidates, const VectorXd& theta_true);

}  // namespace rlex
