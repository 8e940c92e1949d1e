#include "rlex/io.hpp"

#include <nlohmann/json.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace rlex {

using nlohmann::json;

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json vector_to_json(const VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

VectorXd vector_from_json(const json& arr) {
  VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

json box_to_json(const Box& box) {
  return json{{"lo", vector_to_json(box.lo)}, {"hi", vector_to_json(box.hi)}};
}

Box box_from_json(const json& j) {
  return Box(vector_from_json(j.at("lo")), vector_from_json(j.at("hi")));
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

void write_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  out << j.dump(2) << "\n";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  out << text;
}

// ---------------------------------------------------------------------------
// Policies
// ---------------------------------------------------------------------------

namespace {

json arch_to_json(const Architecture& arch) {
  json j;
  j["kind"] = arch.kind == Architecture::Kind::constant ? "constant" : "net";
  j["state_dim"] = arch.state_dim;
  if (arch.kind == Architecture::Kind::constant) {
    j["constant_dim"] = arch.constant_dim;
  } else {
    json layers = json::array();
    for (const auto& [in, out] : arch.layers) layers.push_back(json::array({in, out}));
    j["layers"] = layers;
    j["hidden"] = to_string(arch.hidden);
    j["output"] = to_string(arch.output);
    j["output_scale"] = arch.output_scale;
  }
  return j;
}

Architecture arch_from_json(const json& j) {
  Architecture arch;
  const std::string kind = j.at("kind").get<std::string>();
  arch.state_dim = j.at("state_dim").get<int>();
  if (kind == "constant") {
    arch.kind = Architecture::Kind::constant;
    arch.constant_dim = j.at("constant_dim").get<int>();
  } else if (kind == "net") {
    arch.kind = Architecture::Kind::net;
    for (const auto& layer : j.at("layers"))
      arch.layers.emplace_back(layer.at(0).get<int>(), layer.at(1).get<int>());
    arch.hidden = activation_from_string(j.at("hidden").get<std::string>());
    arch.output = activation_from_string(j.at("output").get<std::string>());
    arch.output_scale = j.value("output_scale", 1.0);
  } else {
    throw ConfigError("unknown architecture kind: " + kind);
  }
  arch.validate();
  return arch;
}

}  // namespace

void save_policy(const PolicyParams& policy, const std::filesystem::path& path) {
  json j;
  j["arch"] = arch_to_json(policy.arch);
  j["theta"] = vector_to_json(policy.theta);
  write_json_file(j, path);
}

PolicyParams load_policy(const std::filesystem::path& path) {
  const json j = load_json_file(path);
  const Architecture arch = arch_from_json(j.at("arch"));
  return make_policy(arch, vector_from_json(j.at("theta")));
}

// ---------------------------------------------------------------------------
// Trajectories and observation logs
// ---------------------------------------------------------------------------

void save_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  const int q = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
  const int m = traj.actions.empty() ? 0 : static_cast<int>(traj.actions.front().size());
  out << "k";
  for (int i = 1; i <= q; ++i) out << ",s_" << i;
  for (int i = 1; i <= m; ++i) out << ",a_" << i;
  out << ",r\n";
  for (std::size_t k = 0; k < traj.length(); ++k) {
    out << k;
    for (int i = 0; i < q; ++i) out << "," << format_double(traj.states[k][i]);
    for (int i = 0; i < m; ++i) out << "," << format_double(traj.actions[k][i]);
    out << "," << format_double(traj.rewards[k]) << "\n";
  }
}

ObservationLog load_observations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty trajectory file: " + path.string());
  const auto header = split_csv_line(line);
  int q = 0, m = 0;
  for (const auto& name : header) {
    if (name.rfind("s_", 0) == 0) ++q;
    if (name.rfind("a_", 0) == 0) ++m;
  }
  if (header.empty() || header.front() != "k" || q == 0 || m == 0)
    throw ConfigError("unrecognized trajectory header in " + path.string());

  ObservationLog log;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) < 1 + q + m)
      throw ConfigError("short trajectory row in " + path.string());
    Observation obs;
    obs.k = std::stoi(cells[0]);
    obs.state.resize(q);
    obs.action.resize(m);
    for (int i = 0; i < q; ++i) obs.state[i] = std::stod(cells[1 + static_cast<std::size_t>(i)]);
    for (int i = 0; i < m; ++i)
      obs.action[i] = std::stod(cells[1 + static_cast<std::size_t>(q + i)]);
    log.records.push_back(std::move(obs));
  }
  log.validate();
  return log;
}

// ---------------------------------------------------------------------------
// Gradient samples
// ---------------------------------------------------------------------------

void save_gradient_samples(const GradientSamples& samples, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  const int l = samples.param_dim();
  for (int d = 1; d <= l; ++d) out << "theta_" << d << ",";
  out << "j,gtilde\n";
  for (std::int64_t i = 0; i < samples.values.rows(); ++i) {
    for (int j = 0; j < l; ++j) {
      for (int d = 0; d < l; ++d) out << format_double(samples.grid.points(i, d)) << ",";
      out << j << "," << format_double(samples.values(i, j)) << "\n";
    }
  }

  json meta;
  meta["c"] = samples.c;
  meta["eta"] = samples.grid.eta;
  meta["sparse"] = samples.grid.sparse;
  meta["box"] = box_to_json(samples.grid.box);
  meta["axis_counts"] = samples.grid.axis_counts;
  meta["points"] = samples.values.rows();
  // Note: for sparse grids eta is the effective-spacing extension, not an
  // axis spacing.
  meta["eta_is_effective_spacing"] = samples.grid.sparse;
  write_json_file(meta, std::filesystem::path(path.string() + ".meta.json"));
}

GradientSamples load_gradient_samples(const std::filesystem::path& path) {
  const json meta = load_json_file(std::filesystem::path(path.string() + ".meta.json"));
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty samples file: " + path.string());
  const auto header = split_csv_line(line);
  int l = 0;
  for (const auto& name : header)
    if (name.rfind("theta_", 0) == 0) ++l;
  if (l == 0 || header.size() != static_cast<std::size_t>(l) + 2)
    throw ConfigError("unrecognized samples header in " + path.string());

  const std::int64_t M = meta.at("points").get<std::int64_t>();
  GradientSamples samples;
  samples.c = meta.at("c").get<double>();
  samples.grid.box = box_from_json(meta.at("box"));
  samples.grid.eta = meta.at("eta").get<double>();
  samples.grid.sparse = meta.at("sparse").get<bool>();
  samples.grid.axis_counts = meta.at("axis_counts").get<std::vector<int>>();
  samples.grid.points.resize(M, l);
  samples.values.resize(M, l);

  std::int64_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != static_cast<std::size_t>(l) + 2)
      throw ConfigError("short samples row in " + path.string());
    const std::int64_t point = row / l;
    const int j = std::stoi(cells[static_cast<std::size_t>(l)]);
    if (point >= M || j != static_cast<int>(row % l))
      throw ConfigError("samples rows out of order in " + path.string());
    if (j == 0)
      for (int d = 0; d < l; ++d)
        samples.grid.points(point, d) = std::stod(cells[static_cast<std::size_t>(d)]);
    samples.values(point, j) = std::stod(cells[static_cast<std::size_t>(l) + 1]);
    ++row;
  }
  if (row != M * l) throw ConfigError("samples row count mismatch in " + path.string());
  return samples;
}

// ---------------------------------------------------------------------------
// Surrogates and budgets
// ---------------------------------------------------------------------------

namespace {

json budget_to_json(const ErrorBudget& budget) {
  json j;
  j["c"] = budget.c;
  j["m_bar"] = budget.m_bar;
  j["eta"] = budget.eta;
  j["L_g"] = vector_to_json(budget.L_g);
  j["L_ghat"] = vector_to_json(budget.L_ghat);
  j["L_gtilde"] = vector_to_json(budget.L_gtilde);
  j["zeta"] = vector_to_json(budget.zeta);
  j["e"] = vector_to_json(budget.e);
  return j;
}

}  // namespace

void save_surrogate(const Surrogate& surrogate, const std::filesystem::path& path,
                    const ErrorBudget* budget) {
  json j;
  if (budget != nullptr) j["budget"] = budget_to_json(*budget);
  json dict = json::array();
  for (const auto& k : surrogate.dictionary) {
    json kj;
    kj["type"] = to_string(k.type);
    if (k.type == KernelSpec::Type::gaussian) kj["bandwidth"] = k.bandwidth;
    dict.push_back(kj);
  }
  j["dictionary"] = dict;
  j["random_budget"] = surrogate.random_budget;
  j["feature_seed"] = surrogate.feature_seed;
  j["feature_dim"] = surrogate.feature_dim();
  j["box"] = box_to_json(surrogate.box);
  j["eta"] = surrogate.eta;
  j["sparse_grid"] = surrogate.sparse_grid;
  j["eta_is_effective_spacing"] = surrogate.sparse_grid;
  json alpha = json::array();
  for (int r = 0; r < surrogate.alpha.rows(); ++r)
    alpha.push_back(vector_to_json(surrogate.alpha.row(r).transpose()));
  j["alpha"] = alpha;
  write_json_file(j, path);
}

Surrogate load_surrogate(const std::filesystem::path& path) {
  const json j = load_json_file(path);
  Surrogate sur;
  for (const auto& kj : j.at("dictionary")) {
    KernelSpec spec;
    spec.type = kernel_type_from_string(kj.at("type").get<std::string>());
    if (spec.type == KernelSpec::Type::gaussian) spec.bandwidth = kj.at("bandwidth").get<double>();
    sur.dictionary.push_back(spec);
  }
  sur.random_budget = j.at("random_budget").get<int>();
  sur.feature_seed = j.at("feature_seed").get<std::uint64_t>();
  sur.box = box_from_json(j.at("box"));
  sur.eta = j.at("eta").get<double>();
  sur.sparse_grid = j.at("sparse_grid").get<bool>();
  const auto& alpha = j.at("alpha");
  const int l = static_cast<int>(alpha.size());
  if (l == 0) throw ConfigError("surrogate with no components in " + path.string());
  sur.features = FeatureMap(sur.dictionary, sur.random_budget, l, sur.feature_seed);
  sur.alpha.resize(l, sur.features.dim());
  for (int r = 0; r < l; ++r) {
    const VectorXd row = vector_from_json(alpha[static_cast<std::size_t>(r)]);
    if (row.size() != sur.features.dim())
      throw ConfigError("surrogate alpha width mismatch in " + path.string());
    sur.alpha.row(r) = row.transpose();
  }
  if (j.at("feature_dim").get<int>() != sur.features.dim())
    throw ConfigError("surrogate feature_dim mismatch in " + path.string());
  return sur;
}

void save_budget(const ErrorBudget& budget, const std::filesystem::path& path) {
  write_json_file(budget_to_json(budget), path);
}

ErrorBudget load_budget(const std::filesystem::path& path) {
  const json j = load_json_file(path);
  ErrorBudget budget = assemble_budget(
      j.at("c").get<double>(), j.at("m_bar").get<double>(), vector_from_json(j.at("L_g")),
      vector_from_json(j.at("zeta")), j.at("eta").get<double>(),
      vector_from_json(j.at("L_ghat")), vector_from_json(j.at("L_gtilde")));
  // The persisted e must match the recomputed identity exactly.
  const VectorXd stored = vector_from_json(j.at("e"));
  if (stored.size() != budget.e.size())
    throw InvariantViolation("budget component count mismatch in " + path.string());
  for (Eigen::Index i = 0; i < stored.size(); ++i) {
    if (stored[i] != budget.e[i])
      throw InvariantViolation("budget identity violated in " + path.string());
  }
  return budget;
}

// ---------------------------------------------------------------------------
// Candidate sets
// ---------------------------------------------------------------------------

void save_candidates(const CandidateSet& candidates, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  for (const auto& cand : candidates.candidates) {
    json line;
    line["theta"] = vector_to_json(cand.theta);
    line["residual"] = cand.residual;
    if (std::isfinite(cand.min_prior_dist))
      line["min_prior_dist"] = cand.min_prior_dist;
    else
      line["min_prior_dist"] = nullptr;
    out << line.dump() << "\n";
  }

  json summary;
  summary["r_cand"] = candidates.candidates.size();
  summary["termination"] =
      candidates.termination == CandidateSet::Termination::exhausted ? "exhausted"
                                                                     : "budget_exceeded";
  summary["certified_exhausted"] = candidates.certified_exhausted;
  summary["b_sep"] = candidates.b_sep;
  summary["delta"] = candidates.delta;
  summary["backend"] = candidates.backend;
  summary["solve_calls"] = candidates.solve_calls;
  summary["stats"] = {{"boxes_explored", candidates.totals.boxes_explored},
                      {"restarts", candidates.totals.restarts}};
  summary["coverage_guarantee"] =
      candidates.certified_exhausted
          ? "holds (certified exhaustion)"
          : "not certified (multistart or work-limit termination)";
  write_json_file(summary, std::filesystem::path(path.string() + ".summary.json"));
}

CandidateSet load_candidates(const std::filesystem::path& path) {
  const json summary = load_json_file(std::filesystem::path(path.string() + ".summary.json"));
  CandidateSet set;
  set.termination = summary.at("termination").get<std::string>() == "exhausted"
                        ? CandidateSet::Termination::exhausted
                        : CandidateSet::Termination::budget_exceeded;
  set.certified_exhausted = summary.at("certified_exhausted").get<bool>();
  set.b_sep = summary.at("b_sep").get<double>();
  set.delta = summary.at("delta").get<double>();
  set.backend = summary.at("backend").get<std::string>();
  set.solve_calls = summary.at("solve_calls").get<int>();
  set.totals.boxes_explored = summary.at("stats").at("boxes_explored").get<std::int64_t>();
  set.totals.restarts = summary.at("stats").at("restarts").get<std::int64_t>();

  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json lj;
    try {
      lj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ConfigError("malformed candidate line in " + path.string() + ": " + e.what());
    }
    Candidate cand;
    cand.theta = vector_from_json(lj.at("theta"));
    cand.residual = lj.at("residual").get<double>();
    cand.min_prior_dist = lj.at("min_prior_dist").is_null()
                              ? std::numeric_limits<double>::infinity()
                              : lj.at("min_prior_dist").get<double>();
    set.candidates.push_back(std::move(cand));
  }
  if (set.candidates.size() != summary.at("r_cand").get<std::size_t>())
    throw InvariantViolation("candidate count does not match summary in " + path.string());
  return set;
}

void validate_candidates(const CandidateSet& candidates, const Surrogate& surrogate,
                         const VectorXd& e) {
  const double slack = candidates.delta * (1.0 + 1e-9) + 1e-12;
  for (std::size_t i = 0; i < candidates.candidates.size(); ++i) {
    const VectorXd& theta_i = candidates.candidates[i].theta;
    const VectorXd values = surrogate.eval_all(theta_i);
    for (Eigen::Index j = 0; j < values.size(); ++j) {
      if (std::abs(values[j]) > e[j] + slack)
        throw InvariantViolation("candidate " + std::to_string(i) +
                                 " violates the budget constraint at component " +
                                 std::to_string(j));
    }
    for (std::size_t k = 0; k < i; ++k) {
      const double dist = (theta_i - candidates.candidates[k].theta).norm();
      if (dist < candidates.b_sep - slack)
        throw InvariantViolation("candidates " + std::to_string(i) + " and " +
                                 std::to_string(k) + " violate the separation radius");
    }
  }
}

// ---------------------------------------------------------------------------
// Filter reports
// ---------------------------------------------------------------------------

void save_filter_report(const FilterState& fs, const std::filesystem::path& path) {
  json j;
  j["psi"] = fs.psi;
  j["q"] = fs.shortlisted_count();
  j["candidates"] = fs.candidate_count();
  j["observations"] = fs.observations_seen;
  j["shortlisted"] = fs.shortlisted();
  j["discarded"] = fs.discarded_indices();
  j["max_error"] = std::vector<double>(fs.max_error.begin(), fs.max_error.end());
  j["violation_at"] = fs.violation_at;
  // Shortlist membership is conditional on the observed trajectory; it is
  // not a certificate of the state-space-wide error.
  j["note"] = "shortlist is trajectory-conditional";
  write_json_file(j, path);
}

FilterState load_filter_report(const std::filesystem::path& path) {
  const json j = load_json_file(path);
  FilterState fs = init_filter(j.at("candidates").get<std::size_t>(), j.at("psi").get<double>());
  fs.observations_seen = j.at("observations").get<std::int64_t>();
  const auto max_error = j.at("max_error").get<std::vector<double>>();
  const auto violation_at = j.at("violation_at").get<std::vector<int>>();
  if (max_error.size() != fs.candidate_count() || violation_at.size() != fs.candidate_count())
    throw InvariantViolation("filter report arrays are inconsistent in " + path.string());
  fs.max_error = max_error;
  fs.violation_at = violation_at;
  for (int idx : j.at("discarded").get<std::vector<int>>())
    fs.discarded[static_cast<std::size_t>(idx)] = true;
  return fs;
}

void save_error_series(const ErrorReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  out << "k";
  for (int idx : report.candidate_indices) out << ",err_" << idx;
  out << "\n";
  for (Eigen::Index t = 0; t < report.errors.rows(); ++t) {
    out << report.time_indices[static_cast<std::size_t>(t)];
    for (Eigen::Index c = 0; c < report.errors.cols(); ++c)
      out << "," << format_double(report.errors(t, c));
    out << "\n";
  }
}

void save_training_log(const TrainResult& result, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  out << "step,jbar,grad_inf_norm\n";
  for (const auto& row : result.history)
    out << static_cast<std::int64_t>(row[0]) << "," << format_double(row[1]) << ","
        << format_double(row[2]) << "\n";
}

}  // namespace rlex
