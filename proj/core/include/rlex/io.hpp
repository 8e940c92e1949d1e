#pragma once

#include "rlex/enumerator.hpp"
#include "rlex/online.hpp"
#include "rlex/policy.hpp"
#include "rlex/surrogate.hpp"
#include "rlex/trainer.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace rlex {

// All artifacts round-trip at full precision; doubles are printed with 17
// significant digits in CSV and shortest-exact form in JSON.

void save_policy(const PolicyParams& policy, const std::filesystem::path& path);
PolicyParams load_policy(const std::filesystem::path& path);

/// Trajectory CSV with columns k, s_1..s_q, a_1..a_m, r.
void save_trajectory(const Trajectory& traj, const std::filesystem::path& path);
/// Reads a trajectory CSV back as an observation log (the reward column is
/// ignored); state/action split is inferred from the header.
ObservationLog load_observations(const std::filesystem::path& path);

/// Grid samples CSV with columns theta_1..theta_l, j, gtilde plus a sidecar
/// meta JSON (same path + ".meta.json") carrying c, eta, the box and the
/// sparse flag so fits are reproducible without re-simulation.
void save_gradient_samples(const GradientSamples& samples, const std::filesystem::path& path);
GradientSamples load_gradient_samples(const std::filesystem::path& path);

/// The budget, when given, is embedded under "budget" so the surrogate file
/// is self-describing; budget.json stays the canonical stage input.
void save_surrogate(const Surrogate& surrogate, const std::filesystem::path& path,
                    const ErrorBudget* budget = nullptr);
Surrogate load_surrogate(const std::filesystem::path& path);

void save_budget(const ErrorBudget& budget, const std::filesystem::path& path);
ErrorBudget load_budget(const std::filesystem::path& path);

/// Candidates as JSON lines (theta, residual, min_prior_dist) plus a summary
/// JSON (path + ".summary.json") with counts, termination and solver stats.
void save_candidates(const CandidateSet& candidates, const std::filesystem::path& path);
CandidateSet load_candidates(const std::filesystem::path& path);

/// Re-checks the persisted candidate invariants (pairwise separation and
/// budget feasibility within delta). Throws InvariantViolation on failure.
void validate_candidates(const CandidateSet& candidates, const Surrogate& surrogate,
                         const VectorXd& e);

void save_filter_report(const FilterState& fs, const std::filesystem::path& path);
FilterState load_filter_report(const std::filesystem::path& path);

/// Error series CSV: column k then one err_<candidate index> column per
/// shortlisted candidate.
void save_error_series(const ErrorReport& report, const std::filesystem::path& path);

void save_training_log(const TrainResult& result, const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace rlex
