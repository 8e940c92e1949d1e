#pragma once

#include "rlex/config.hpp"
#include "rlex/io.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace rlex {

// Exit codes shared by the pipeline stages and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitSolverBudget = 3;
inline constexpr int kExitInvariant = 4;

/// Canonical artifact locations inside a run directory. Every stage consumes
/// and produces only these files, so stages are independently re-runnable.
struct StagePaths {
  std::filesystem::path workdir;

  std::filesystem::path victim_policy() const { return workdir / "victim_policy.json"; }
  std::filesystem::path training_log() const { return workdir / "training_log.csv"; }
  std::filesystem::path trajectory() const { return workdir / "trajectory.csv"; }
  std::filesystem::path samples() const { return workdir / "samples.csv"; }
  std::filesystem::path surrogate() const { return workdir / "surrogate.json"; }
  std::filesystem::path budget() const { return workdir / "budget.json"; }
  std::filesystem::path candidates() const { return workdir / "candidates.jsonl"; }
  std::filesystem::path filter_report() const { return workdir / "filter.json"; }
  std::filesystem::path error_series() const { return workdir / "error_series.csv"; }
  std::filesystem::path sweep() const { return workdir / "sweep.csv"; }
  std::filesystem::path sweep_summary() const { return workdir / "sweep_summary.json"; }
  std::filesystem::path report() const { return workdir / "report.json"; }
  std::filesystem::path phase_times() const { return workdir / "phase_times.json"; }
  std::filesystem::path manifest() const { return workdir / "manifest.json"; }
};

/// Options that the CLI may override relative to the config file.
struct FilterOverrides {
  std::optional<std::filesystem::path> candidates;
  std::optional<std::filesystem::path> trajectory;
  std::optional<double> psi;
};

int run_train(const RunConfig& cfg, std::ostream& log);
int run_sample(const RunConfig& cfg, std::ostream& log);
int run_fit(const RunConfig& cfg, std::ostream& log);
int run_enumerate(const RunConfig& cfg, std::ostream& log);
int run_filter(const RunConfig& cfg, const FilterOverrides& overrides, std::ostream& log);
int run_evaluate(const RunConfig& cfg, int sweep_samples_override, std::ostream& log);
int run_report(const RunConfig& cfg, std::ostream& log);

/// The separation radius used by the enumeration stage: the configured value
/// or psi / G, validated against b_sep <= psi / G.
double resolve_b_sep(const RunConfig& cfg, double G);

/// Estimated or configured policy smoothness constants for the attack.
SmoothnessConstants resolve_constants(const RunConfig& cfg);

}  // namespace rlex
