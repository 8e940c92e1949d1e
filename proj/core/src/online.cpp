#include "rlex/online.hpp"

#include <algorithm>

namespace rlex {

void ObservationLog::validate() const {
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i > 0 && records[i].k <= records[i - 1].k)
      throw InvariantViolation("ObservationLog: time indices must be strictly increasing");
    if (records[i].state.size() != records.front().state.size() ||
        records[i].action.size() != records.front().action.size())
      throw InvariantViolation("ObservationLog: inconsistent dimensions");
  }
}

int FilterState::shortlisted_count() const {
  int q = 0;
  for (bool d : discarded) q += d ? 0 : 1;
  return q;
}

std::vector<int> FilterState::shortlisted() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < discarded.size(); ++i)
    if (!discarded[i]) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> FilterState::discarded_indices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < discarded.size(); ++i)
    if (discarded[i]) out.push_back(static_cast<int>(i));
  return out;
}

FilterState init_filter(std::size_t candidate_count, double psi) {
  if (candidate_count == 0) throw std::invalid_argument("init_filter: empty candidate set");
  if (!(psi > 0.0)) throw std::invalid_argument("init_filter: psi must be positive");
  FilterState fs;
  fs.psi = psi;
  fs.discarded.assign(candidate_count, false);
  fs.max_error.assign(candidate_count, 0.0);
  fs.violation_at.assign(candidate_count, -1);
  return fs;
}

void observe(FilterState& fs, const std::vector<PolicyParams>& candidates,
             const Observation& obs) {
  if (candidates.size() != fs.candidate_count())
    throw std::invalid_argument("observe: candidate count mismatch");
  ++fs.observations_seen;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (fs.discarded[i]) continue;
    const double err = (evaluate(candidates[i], obs.state) - obs.action).norm();
    fs.max_error[i] = std::max(fs.max_error[i], err);
    if (err > fs.psi) {
      fs.discarded[i] = true;
      fs.violation_at[i] = obs.k;
    }
  }
}

int run_filter(FilterState& fs, const std::vector<PolicyParams>& candidates,
               const ObservationLog& log) {
  log.validate();
  for (const Observation& obs : log.records) observe(fs, candidates, obs);
  return fs.shortlisted_count();
}

ErrorReport report_errors(const FilterState& fs, const std::vector<PolicyParams>& candidates,
                          const ObservationLog& log) {
  if (candidates.size() != fs.candidate_count())
    throw std::invalid_argument("report_errors: candidate count mismatch");
  ErrorReport report;
  report.candidate_indices = fs.shortlisted();
  report.time_indices.reserve(log.records.size());
  for (const Observation& obs : log.records) report.time_indices.push_back(obs.k);
  report.errors.resize(static_cast<Eigen::Index>(log.records.size()),
                       static_cast<Eigen::Index>(report.candidate_indices.size()));
  for (std::size_t t = 0; t < log.records.size(); ++t) {
    const Observation& obs = log.records[t];
    for (std::size_t c = 0; c < report.candidate_indices.size(); ++c) {
      const auto& cand = candidates[static_cast<std::size_t>(report.candidate_indices[c])];
      report.errors(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) =
          (evaluate(cand, obs.state) - obs.action).norm();
    }
  }
  return report;
}

}  // namespace rlex
