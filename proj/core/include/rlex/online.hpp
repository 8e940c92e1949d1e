#pragma once

#include "rlex/common.hpp"
#include "rlex/policy.hpp"

#include <vector>

namespace rlex {

struct Observation {
  int k = 0;
  VectorXd state;
  VectorXd action;
};

/// Time-indexed (state, action) pairs observed from the victim controller.
struct ObservationLog {
  std::vector<Observation> records;

  void validate() const;  // strictly increasing k, consistent dimensions
};

/// Shortlist/discard partition of the candidate policies under the error
/// threshold psi. A candidate moves to the discarded set on the first sample
/// where its action error strictly exceeds psi and is never re-admitted.
struct FilterState {
  double psi = 0.0;
  std::vector<bool> discarded;
  std::vector<double> max_error;     // per candidate, over processed samples
  std::vector<int> violation_at;     // time index of the discarding sample, -1 if retained
  std::int64_t observations_seen = 0;

  std::size_t candidate_count() const { return discarded.size(); }
  int shortlisted_count() const;
  std::vector<int> shortlisted() const;
  std::vector<int> discarded_indices() const;
};

FilterState init_filter(std::size_t candidate_count, double psi);

/// Processes one observation: every still-shortlisted candidate with
/// ||pi_cand(state) - action|| > psi is discarded (strict inequality).
void observe(FilterState& fs, const std::vector<PolicyParams>& candidates,
             const Observation& obs);

/// Folds observe over the log; returns q = |shortlist|.
int run_filter(FilterState& fs, const std::vector<PolicyParams>& candidates,
               const ObservationLog& log);

/// Per-sample error series of the shortlisted candidates: element (t, i) is
/// the error of shortlisted candidate i at log record t.
struct ErrorReport {
  std::vector<int> candidate_indices;
  std::vector<int> time_indices;
  MatrixXd errors;  // time x shortlisted candidate
};

ErrorReport report_errors(const FilterState& fs, const std::vector<PolicyParams>& candidates,
                          const ObservationLog& log);

}  // namespace rlex
