#include "rlex/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace rlex {

using nlohmann::json;

namespace {

class PhaseTimer {
 public:
  PhaseTimer(const StagePaths& paths, std::string phase)
      : paths_(paths), phase_(std::move(phase)), start_(std::chrono::steady_clock::now()) {}

  ~PhaseTimer() {
    try {
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
      json times = json::object();
      {
        std::ifstream in(paths_.phase_times());
        if (in) {
          try {
            in >> times;
          } catch (...) {
            times = json::object();
          }
        }
      }
      times[phase_] = seconds;
      std::ofstream out(paths_.phase_times());
      if (out) out << times.dump(2) << "\n";
    } catch (...) {
      // Timing bookkeeping must never mask the stage outcome.
    }
  }

 private:
  StagePaths paths_;
  std::string phase_;
  std::chrono::steady_clock::time_point start_;
};

StagePaths prepare_workdir(const RunConfig& cfg) {
  StagePaths paths{cfg.workdir};
  std::error_code ec;
  std::filesystem::create_directories(paths.workdir, ec);
  if (ec) throw ConfigError("cannot create workdir " + paths.workdir.string());
  set_thread_count(cfg.threads);
  return paths;
}

// Seed branches per stage, disjoint from the evaluator branches in config.cpp.
constexpr std::uint64_t kProbeSeedTag = 0x50524f42;
constexpr std::uint64_t kSweepSeedTag = 0x53574550;

std::vector<PolicyParams> candidate_policies(const Architecture& arch,
                                             const CandidateSet& set) {
  std::vector<PolicyParams> out;
  out.reserve(set.candidates.size());
  for (const auto& cand : set.candidates) {
    if (cand.theta.size() != arch.param_count())
      throw InvariantViolation("candidate dimension does not match the configured architecture");
    out.push_back(make_policy(arch, cand.theta));
  }
  return out;
}

}  // namespace

double resolve_b_sep(const RunConfig& cfg, double G) {
  if (!(G > 0.0)) throw ConfigError("policy gain G must be positive to derive b_sep");
  const double limit = cfg.attack.psi / G;
  const double b_sep = cfg.attack.b_sep > 0.0 ? cfg.attack.b_sep : limit;
  if (b_sep > limit * (1.0 + 1e-12))
    throw ConfigError("attack.b_sep = " + std::to_string(b_sep) + " exceeds psi / G = " +
                      std::to_string(limit));
  return b_sep;
}

SmoothnessConstants resolve_constants(const RunConfig& cfg) {
  SmoothnessConstants consts;
  consts.horizon = cfg.objective.horizon;
  consts.gamma = cfg.objective.discount;
  if (cfg.attack.G > 0.0) {
    consts.G = cfg.attack.G;
    consts.L = cfg.attack.L;
    consts.R = 0.0;
    return consts;
  }
  const Environment env = cfg.make_attacker_environment();
  ConstantsOptions opts;
  opts.safety_factor = cfg.surrogate.safety_factor;
  opts.horizon = cfg.objective.horizon;
  opts.gamma = cfg.objective.discount;
  return estimate_constants(env, cfg.architecture, cfg.theta_box(), env.state_box,
                            cfg.attack.constant_samples, cfg.attack.constants_seed, opts);
}

int run_train(const RunConfig& cfg, std::ostream& log) {
  const StagePaths paths = prepare_workdir(cfg);
  PhaseTimer timer(paths, "train");

  const Environment env = cfg.make_environment();
  const ObjectiveEvaluator ev = cfg.make_trainer_evaluator();
  const TrainResult result = train(env, cfg.architecture, ev, cfg.theta_box(), cfg.trainer);

  save_policy(result.policy, paths.victim_policy());
  save_training_log(result, paths.training_log());

  // Victim observation dump for the online phase.
  if (cfg.online.observations > 0) {
    const Trajectory traj =
        simulate(env, result.policy, cfg.online.observations - 1, cfg.online.trajectory_seed);
    save_trajectory(traj, paths.trajectory());
  }

  write_text(paths.manifest(), json{{"seed", cfg.seed},
                                    {"workdir", cfg.workdir.string()},
                                    {"config_fingerprint", cfg.fingerprint}}
                                       .dump(2) +
                                   "\n");

  log << "train: J = " << result.final_objective << ", |grad|_inf = " << result.final_grad_norm
      << (result.converged ? "" : " (warning: stationarity tolerance not reached)") << "\n"
      << "train: wrote " << paths.victim_policy().string() << "\n";
  return kExitOk;
}

int run_sample(const RunConfig& cfg, std::ostream& log) {
  const StagePaths paths = prepare_workdir(cfg);
  PhaseTimer timer(paths, "sample");

  ObjectiveEvaluator ev = cfg.make_attacker_evaluator();
  const Box box = cfg.theta_box();

  double m_bar = cfg.objective.noise_bound;
  if (m_bar < 0.0) {
    RngStream probe_rng(substream_seed(cfg.seed, kProbeSeedTag));
    std::vector<VectorXd> probes;
    probes.reserve(static_cast<std::size_t>(std::max(10, cfg.objective.noise_probes)));
    for (int i = 0; i < std::max(10, cfg.objective.noise_probes); ++i)
      probes.push_back(box.sample(probe_rng));
    m_bar = estimate_noise_bound(ev, probes, cfg.objective.noise_confidence);
  } else {
    ev.noise_bound = m_bar;
  }

  ParameterGrid grid =
      cfg.surrogate.sparse_points > 0
          ? build_sparse_grid(box, cfg.surrogate.sparse_points,
                              substream_seed(cfg.seed, cfg.surrogate.feature_seed))
          : build_grid(box, cfg.surrogate.eta, cfg.surrogate.grid_cap);
  const GradientSamples samples = sample_gradient_grid(ev, grid, cfg.surrogate.c);
  save_gradient_samples(samples, paths.samples());

  // Record the noise bound and evaluation count next to the samples.
  {
    const auto meta_path = std::filesystem::path(paths.samples().string() + ".meta.json");
    json meta = json::parse(read_text(meta_path));
    meta["m_bar"] = m_bar;
    meta["jbar_evaluations"] = ev.eval_count->load();
    write_text(meta_path, meta.dump(2) + "\n");
  }

  log << "sample: " << grid.size() << " grid points, " << ev.eval_count->load()
      << " objective evaluations, m_bar = " << m_bar << "\n";
  return kExitOk;
}

int run_fit(const RunConfig& cfg, std::ostream& log) {
  const StagePaths paths = prepare_workdir(cfg);
  PhaseTimer timer(paths, "fit");

  const GradientSamples samples = load_gradient_samples(paths.samples());
  const json meta =
      json::parse(read_text(std::filesystem::path(paths.samples().string() + ".meta.json")));
  const double m_bar = meta.at("m_bar").get<double>();

  Surrogate surrogate;
  try {
    surrogate = fit_mkl(samples, cfg.surrogate.dictionary, cfg.surrogate.feature_budget,
                        cfg.surrogate.ridge, cfg.surrogate.feature_seed);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const VectorXd zeta = sample_error(surrogate, samples);
  const VectorXd L_gtilde = lipschitz_from_grid(samples, cfg.surrogate.safety_factor);
  const VectorXd L_ghat = surrogate.lipschitz(samples.grid.box);
  // The true-gradient Lipschitz constant is estimated from the same samples;
  // the closed-form bound from the smoothness constants is logged as an
  // upper cross-check when available.
  const VectorXd& L_g = L_gtilde;
  const ErrorBudget budget =
      assemble_budget(samples.c, m_bar, L_g, zeta, samples.grid.eta, L_ghat, L_gtilde);

  save_surrogate(surrogate, paths.surrogate(), &budget);
  save_budget(budget, paths.budget());

  log << "fit: " << surrogate.feature_dim() << " features over " << samples.values.rows()
      << " samples; max e_j = " << budget.e.maxCoeff()
      << ", min e_j = " << budget.e.minCoeff() << "\n";
  return kExitOk;
}

int run_enumerate(const RunConfig& cfg, std::ostream& log) {
  const StagePaths paths = prepare_workdir(cfg);
  PhaseTimer timer(paths, "enumerate");

  const Surrogate surrogate = load_surrogate(paths.surrogate());
  const ErrorBudget budget = load_budget(paths.budget());
  const SmoothnessConstants consts = resolve_constants(cfg);
  const double b_sep = resolve_b_sep(cfg, consts.G);

  const CandidateSet set =
      enumerate_candidates(surrogate, budget.e, cfg.theta_box(), b_sep, cfg.solver);
  save_candidates(set, paths.candidates());
  validate_candidates(set, surrogate, budget.e);

  log << "enumerate: r = " << set.size() << " candidates, termination = "
      << (set.termination == CandidateSet::Termination::exhausted ? "exhausted"
                                                                  : "budget_exceeded")
      << (set.certified_exhausted ? " (certified)" : " (not certified)") << ", b_sep = " << b_sep
      << "\n";
  if (set.termination == CandidateSet::Termination::budget_exceeded) {
    log << "enumerate: warning: work budget exceeded, the coverage guarantee is void\n";
    return kExitSolverBudget;
  }
  return kExitOk;
}

int run_filter(const RunConfig& cfg, const FilterOverrides& overrides, std::ostream& log) {
  const StagePaths paths = prepare_workdir(cfg);
  PhaseTimer timer(paths, "filter");

  const CandidateSet set =
      load_candidates(overrides.candidates.value_or(paths.candidates()));
  if (set.candidates.empty()) throw InvariantViolation("filter: empty candidate set");
  const std::vector<PolicyParams> policies = candidate_policies(cfg.architecture, set);
  const ObservationLog observations =
      load_observations(overrides.trajectory.value_or(paths.trajectory()));
  const double psi = overrides.psi.value_or(cfg.attack.psi);

  FilterState fs = init_filter(policies.size(), psi);
  const int q = run_filter(fs, policies, observations);
  save_filter_report(fs, paths.filter_report());
  save_error_series(report_errors(fs, policies, observations), paths.error_series());

  log << "filter: " << observations.records.size() << " observations, q = " << q << " of "
      << policies.size() << " candidates remain\n";
  return kExitOk;
}

int run_evaluate(const RunConfig& cfg, int sweep_samples_override, std::ostream& log) {
  const StagePaths paths = prepare_workdir(cfg);
  PhaseTimer timer(paths, "evaluate");

  const PolicyParams victim = load_policy(paths.victim_policy());
  const CandidateSet set = load_candidates(paths.candidates());
  const std::vector<PolicyParams> policies = candidate_policies(cfg.architecture, set);
  const FilterState fs = load_filter_report(paths.filter_report());
  if (fs.candidate_count() != policies.size())
    throw InvariantViolation("evaluate: filter report does not match the candidate set");
  const std::vector<int> shortlisted = fs.shortlisted();

  const Environment env = cfg.make_environment();
  const int n_samples =
      sweep_samples_override > 0 ? sweep_samples_override : cfg.online.sweep_samples;
  RngStream rng(substream_seed(cfg.seed, kSweepSeedTag));

  // The sweep states are a superset of the observed trajectory states, so
  // per-candidate sweep maxima dominate the trajectory maxima.
  std::vector<VectorXd> states;
  states.reserve(static_cast<std::size_t>(n_samples));
  if (std::filesystem::exists(paths.trajectory())) {
    for (const Observation& obs : load_observations(paths.trajectory()).records)
      states.push_back(obs.state);
  }
  for (int i = 0; i < n_samples; ++i) states.push_back(env.state_box.sample(rng));

  std::ofstream out(paths.sweep());
  if (!out) throw ConfigError("cannot write " + paths.sweep().string());
  out << std::setprecision(17);
  for (int d = 1; d <= env.state_dim; ++d) out << "s_" << d << (d < env.state_dim ? "," : "");
  for (int idx : shortlisted) out << ",err_" << idx;
  out << "\n";

  VectorXd max_err = VectorXd::Zero(static_cast<Eigen::Index>(shortlisted.size()));
  for (const VectorXd& state : states) {
    const VectorXd victim_action = evaluate(victim, state);
    for (int d = 0; d < env.state_dim; ++d) out << state[d] << (d + 1 < env.state_dim ? "," : "");
    for (std::size_t c = 0; c < shortlisted.size(); ++c) {
      const double err =
          (evaluate(policies[static_cast<std::size_t>(shortlisted[c])], state) - victim_action)
              .norm();
      max_err[static_cast<Eigen::Index>(c)] = std::max(max_err[static_cast<Eigen::Index>(c)], err);
      out << "," << err;
    }
    out << "\n";
  }

  json summary;
  summary["samples"] = states.size();
  summary["shortlisted"] = shortlisted;
  json per_candidate = json::object();
  for (std::size_t c = 0; c < shortlisted.size(); ++c)
    per_candidate[std::to_string(shortlisted[c])] = max_err[static_cast<Eigen::Index>(c)];
  summary["max_error"] = per_candidate;
  summary["best_max_error"] = shortlisted.empty() ? json(nullptr) : json(max_err.minCoeff());
  summary["psi"] = fs.psi;
  write_text(paths.sweep_summary(), summary.dump(2) + "\n");

  if (!shortlisted.empty())
    log << "evaluate: best shortlisted max error = " << max_err.minCoeff() << " (psi = " << fs.psi
        << ")\n";
  else
    log << "evaluate: shortlist is empty\n";
  return kExitOk;
}

int run_report(const RunConfig& cfg, std::ostream& log) {
  const StagePaths paths = prepare_workdir(cfg);

  json report;
  report["version"] = "0.1.0";
  report["seed"] = cfg.seed;
  report["workdir"] = cfg.workdir.string();

  if (std::filesystem::exists(paths.phase_times()))
    report["phase_seconds"] = json::parse(read_text(paths.phase_times()));

  if (std::filesystem::exists(paths.budget())) {
    const ErrorBudget budget = load_budget(paths.budget());
    report["budget"] = json::parse(read_text(paths.budget()));
    report["budget_terms"] = {{"fd_bias_max", (budget.c * budget.L_g).maxCoeff()},
                              {"noise_term", 2.0 * budget.m_bar / budget.c},
                              {"zeta_max", budget.zeta.maxCoeff()},
                              {"grid_term_max",
                               (budget.eta * (budget.L_ghat + budget.L_gtilde)).maxCoeff()}};
  }

  if (std::filesystem::exists(paths.candidates())) {
    const CandidateSet set = load_candidates(paths.candidates());
    report["r_cand"] = set.size();
    report["termination"] = set.termination == CandidateSet::Termination::exhausted
                                ? "exhausted"
                                : "budget_exceeded";
    report["certified_exhausted"] = set.certified_exhausted;
    report["b_sep"] = set.b_sep;

    // Distance histogram against the victim, when one is available.
    if (std::filesystem::exists(paths.victim_policy()) && !set.candidates.empty()) {
      const PolicyParams victim = load_policy(paths.victim_policy());
      std::vector<double> dists;
      dists.reserve(set.candidates.size());
      double max_dist = 0.0;
      for (const auto& cand : set.candidates) {
        dists.push_back((cand.theta - victim.theta).norm());
        max_dist = std::max(max_dist, dists.back());
      }
      const int bins = 20;
      std::vector<int> counts(static_cast<std::size_t>(bins), 0);
      const double width = max_dist > 0.0 ? max_dist / bins : 1.0;
      int within_b = 0;
      for (double d : dists) {
        const int bin = std::min(bins - 1, static_cast<int>(d / width));
        ++counts[static_cast<std::size_t>(bin)];
        if (d <= set.b_sep) ++within_b;
      }
      report["distance_histogram"] = {{"bin_width", width},
                                      {"counts", counts},
                                      {"min", dists.empty() ? 0.0
                                                            : *std::min_element(dists.begin(),
                                                                                dists.end())},
                                      {"within_b_sep", within_b}};
    }
  }

  if (std::filesystem::exists(paths.filter_report())) {
    const FilterState fs = load_filter_report(paths.filter_report());
    report["q"] = fs.shortlisted_count();
    report["observations"] = fs.observations_seen;
  }

  if (std::filesystem::exists(paths.sweep_summary()))
    report["sweep"] = json::parse(read_text(paths.sweep_summary()));

  report["provenance"] = {{"config_fingerprint", cfg.fingerprint},
                          {"backend", to_string(cfg.solver.backend)}};

  write_text(paths.report(), report.dump(2) + "\n");
  log << "report: wrote " << paths.report().string() << "\n";
  return kExitOk;
}

}  // namespace rlex
