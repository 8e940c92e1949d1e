#include "rlex/config.hpp"

#include <nlohmann/json.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace rlex {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& known) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key))
      throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double require_number(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
  if (!obj.at(key).is_number()) throw ConfigError("'" + where + "." + key + "' must be a number");
  return obj.at(key).get<double>();
}

double number_or(const json& obj, const std::string& where, const std::string& key, double dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj.at(key).is_number()) throw ConfigError("'" + where + "." + key + "' must be a number");
  return obj.at(key).get<double>();
}

std::string string_or(const json& obj, const std::string& where, const std::string& key,
                      const std::string& dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj.at(key).is_string()) throw ConfigError("'" + where + "." + key + "' must be a string");
  return obj.at(key).get<std::string>();
}

AnalyticObjective parse_descriptor(const json& j) {
  check_keys(j, "environment.descriptor", {"dim", "domain", "poly", "gaussians"});
  AnalyticObjective obj;
  obj.dim = static_cast<int>(require_number(j, "environment.descriptor", "dim"));
  if (!j.contains("domain")) throw ConfigError("descriptor requires a domain box");
  const json& dom = j.at("domain");
  check_keys(dom, "environment.descriptor.domain", {"lo", "hi"});
  const auto lo = dom.at("lo").get<std::vector<double>>();
  const auto hi = dom.at("hi").get<std::vector<double>>();
  obj.domain = Box(Eigen::Map<const VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size())),
                   Eigen::Map<const VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size())));
  if (j.contains("poly")) {
    for (const auto& t : j.at("poly")) {
      check_keys(t, "environment.descriptor.poly[]", {"coef", "exponents"});
      PolyTerm term;
      term.coef = require_number(t, "descriptor.poly[]", "coef");
      term.exponents = t.at("exponents").get<std::vector<int>>();
      obj.poly.push_back(std::move(term));
    }
  }
  if (j.contains("gaussians")) {
    for (const auto& t : j.at("gaussians")) {
      check_keys(t, "environment.descriptor.gaussians[]", {"amp", "center", "sigma"});
      GaussTerm term;
      term.amp = require_number(t, "descriptor.gaussians[]", "amp");
      const auto center = t.at("center").get<std::vector<double>>();
      term.center =
          Eigen::Map<const VectorXd>(center.data(), static_cast<Eigen::Index>(center.size()));
      term.sigma = require_number(t, "descriptor.gaussians[]", "sigma");
      obj.gaussians.push_back(std::move(term));
    }
  }
  try {
    obj.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid descriptor: ") + e.what());
  }
  return obj;
}

}  // namespace

Environment RunConfig::make_environment() const {
  if (environment.preset == "pendulum")
    return pendulum_env(environment.mass, environment.length, environment.gravity,
                        environment.dt, environment.noise_scale);
  if (environment.preset == "mountain_car")
    return mountain_car_env(environment.dt, environment.goal_position, environment.noise_scale);
  if (environment.preset == "synthetic") {
    if (!environment.descriptor)
      throw ConfigError("synthetic preset requires environment.descriptor");
    return synthetic_env(*environment.descriptor);
  }
  throw ConfigError("unknown environment preset: " + environment.preset);
}

Environment RunConfig::make_attacker_environment() const {
  if (environment.preset == "pendulum")
    return pendulum_env(environment.mass * environment.perturb_mass,
                        environment.length * environment.perturb_length,
                        environment.gravity * environment.perturb_gravity, environment.dt,
                        environment.noise_scale);
  return make_environment();
}

Box RunConfig::theta_box() const {
  const int l = architecture.param_count();
  if (!theta_lo_vec.empty()) {
    if (static_cast<int>(theta_lo_vec.size()) != l ||
        static_cast<int>(theta_hi_vec.size()) != l)
      throw ConfigError("theta_box arrays must have one entry per parameter (" +
                        std::to_string(l) + ")");
    return Box(Eigen::Map<const VectorXd>(theta_lo_vec.data(), l),
               Eigen::Map<const VectorXd>(theta_hi_vec.data(), l));
  }
  return Box::cube(l, theta_lo, theta_hi);
}

namespace {
// Fixed seed branches so stages draw from disjoint streams.
constexpr std::uint64_t kEvalSeedTag = 0x45564c31;   // attacker evaluator
constexpr std::uint64_t kTrainSeedTag = 0x54524e31;  // trainer evaluator
}  // namespace

ObjectiveEvaluator RunConfig::make_attacker_evaluator() const {
  ObjectiveEvaluator ev =
      make_evaluator(make_attacker_environment(), architecture, objective.horizon,
                     objective.discount, objective.rollouts_per_eval,
                     substream_seed(seed, kEvalSeedTag));
  ev.injected_noise_amp = objective.injected_noise;
  if (objective.noise_bound >= 0.0) ev.noise_bound = objective.noise_bound;
  return ev;
}

ObjectiveEvaluator RunConfig::make_trainer_evaluator() const {
  return make_evaluator(make_environment(), architecture, objective.horizon, objective.discount,
                        trainer.batch_rollouts, substream_seed(seed, kTrainSeedTag));
}

std::string default_config_text() {
  // The printed starter config is the pendulum experiment, which needs the
  // sparse sampling grid and the multistart backend (11 parameters); the
  // programmatic RunConfig defaults keep the full grid and the certified
  // interval backend for low-dimensional studies.
  RunConfig cfg;
  cfg.surrogate.sparse_points = 1500;
  cfg.solver.backend = SolverConfig::Backend::multistart;
  cfg.solver.max_candidates = 2000;
  json j;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["workdir"] = cfg.workdir.string();
  j["environment"] = {
      {"preset", cfg.environment.preset},
      {"mass", cfg.environment.mass},
      {"length", cfg.environment.length},
      {"gravity", cfg.environment.gravity},
      {"dt", cfg.environment.dt},
      {"noise_scale", cfg.environment.noise_scale},
      {"goal_position", cfg.environment.goal_position},
      {"attacker_perturbation",
       {{"mass", cfg.environment.perturb_mass},
        {"length", cfg.environment.perturb_length},
        {"gravity", cfg.environment.perturb_gravity}}},
  };
  j["architecture"] = {{"kind", "net"},
                       {"state_dim", 3},
                       {"layers", {1, 2, 1}},
                       {"hidden", "relu"},
                       {"output", "tanh_scaled"},
                       {"output_scale", 2.0}};
  j["theta_box"] = {{"lo", cfg.theta_lo}, {"hi", cfg.theta_hi}};
  j["objective"] = {{"horizon", cfg.objective.horizon},
                    {"discount", cfg.objective.discount},
                    {"rollouts_per_eval", cfg.objective.rollouts_per_eval},
                    {"noise_confidence", cfg.objective.noise_confidence},
                    {"noise_probes", cfg.objective.noise_probes},
                    {"injected_noise", cfg.objective.injected_noise},
                    {"noise_bound", cfg.objective.noise_bound}};
  j["trainer"] = {{"steps", cfg.trainer.steps},
                  {"learning_rate", cfg.trainer.learning_rate},
                  {"batch_rollouts", cfg.trainer.batch_rollouts},
                  {"init_scale", cfg.trainer.init_scale},
                  {"seed", cfg.trainer.seed},
                  {"grad_tolerance", cfg.trainer.grad_tolerance},
                  {"fd_step", cfg.trainer.fd_step}};
  j["surrogate"] = {{"c", cfg.surrogate.c},
                    {"eta", cfg.surrogate.eta},
                    {"sparse_points", cfg.surrogate.sparse_points},
                    {"grid_cap", cfg.surrogate.grid_cap},
                    {"feature_budget", cfg.surrogate.feature_budget},
                    {"ridge", cfg.surrogate.ridge},
                    {"safety_factor", cfg.surrogate.safety_factor},
                    {"feature_seed", cfg.surrogate.feature_seed},
                    {"dictionary",
                     {{{"type", "gaussian"}, {"bandwidth", 0.5}},
                      {{"type", "gaussian"}, {"bandwidth", 1.0}},
                      {{"type", "gaussian"}, {"bandwidth", 2.0}},
                      {{"type", "linear"}}}}};
  j["attack"] = {{"psi", cfg.attack.psi},
                 {"b_sep", cfg.attack.b_sep},
                 {"constants",
                  {{"G", cfg.attack.G},
                   {"L", cfg.attack.L},
                   {"samples", cfg.attack.constant_samples},
                   {"seed", cfg.attack.constants_seed}}}};
  j["solver"] = {{"backend", to_string(cfg.solver.backend)},
                 {"delta", cfg.solver.delta},
                 {"max_candidates", cfg.solver.max_candidates},
                 {"max_boxes", cfg.solver.max_boxes},
                 {"max_restarts", cfg.solver.max_restarts},
                 {"descent_iters", cfg.solver.descent_iters},
                 {"seed", cfg.solver.seed}};
  j["online"] = {{"observations", cfg.online.observations},
                 {"trajectory_seed", cfg.online.trajectory_seed},
                 {"sweep_samples", cfg.online.sweep_samples},
                 {"sweep_seed", cfg.online.sweep_seed}};
  return j.dump(2) + "\n";
}

namespace {
RunConfig parse_config_checked(const std::string& text);
}

RunConfig parse_config_text(const std::string& text) {
  try {
    return parse_config_checked(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

namespace {

RunConfig parse_config_checked(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  check_keys(j, "config",
             {"seed", "threads", "workdir", "environment", "architecture", "theta_box",
              "objective", "trainer", "surrogate", "attack", "solver", "online"});

  RunConfig cfg;
  cfg.fingerprint = config_fingerprint(text);
  cfg.seed = static_cast<std::uint64_t>(number_or(j, "config", "seed", 1));
  cfg.threads = static_cast<int>(number_or(j, "config", "threads", 0));
  cfg.workdir = string_or(j, "config", "workdir", "runs/default");

  if (j.contains("environment")) {
    const json& e = j.at("environment");
    check_keys(e, "environment",
               {"preset", "mass", "length", "gravity", "dt", "noise_scale", "goal_position",
                "descriptor", "attacker_perturbation"});
    cfg.environment.preset = string_or(e, "environment", "preset", "pendulum");
    cfg.environment.mass = number_or(e, "environment", "mass", 1.0);
    cfg.environment.length = number_or(e, "environment", "length", 1.0);
    cfg.environment.gravity = number_or(e, "environment", "gravity", 10.0);
    cfg.environment.dt = number_or(e, "environment", "dt", cfg.environment.preset == "mountain_car" ? 1.0 : 0.05);
    cfg.environment.noise_scale = number_or(e, "environment", "noise_scale", 0.0);
    cfg.environment.goal_position = number_or(e, "environment", "goal_position", 0.45);
    if (e.contains("descriptor")) cfg.environment.descriptor = parse_descriptor(e.at("descriptor"));
    if (e.contains("attacker_perturbation")) {
      const json& p = e.at("attacker_perturbation");
      check_keys(p, "environment.attacker_perturbation", {"mass", "length", "gravity"});
      cfg.environment.perturb_mass = number_or(p, "attacker_perturbation", "mass", 1.0);
      cfg.environment.perturb_length = number_or(p, "attacker_perturbation", "length", 1.0);
      cfg.environment.perturb_gravity = number_or(p, "attacker_perturbation", "gravity", 1.0);
    }
  }

  if (j.contains("architecture")) {
    const json& a = j.at("architecture");
    check_keys(a, "architecture",
               {"kind", "state_dim", "constant_dim", "layers", "hidden", "output",
                "output_scale"});
    const std::string kind = string_or(a, "architecture", "kind", "net");
    const int state_dim = static_cast<int>(number_or(a, "architecture", "state_dim", 3));
    try {
      if (kind == "constant") {
        cfg.architecture = Architecture::constant(
            state_dim, static_cast<int>(require_number(a, "architecture", "constant_dim")));
      } else if (kind == "net") {
        std::vector<int> outputs;
        if (!a.contains("layers")) throw ConfigError("architecture.layers is required");
        for (const auto& v : a.at("layers")) outputs.push_back(v.get<int>());
        cfg.architecture = Architecture::net(
            state_dim, outputs,
            activation_from_string(string_or(a, "architecture", "output", "identity")),
            number_or(a, "architecture", "output_scale", 1.0));
        cfg.architecture.hidden =
            activation_from_string(string_or(a, "architecture", "hidden", "relu"));
      } else {
        throw ConfigError("architecture.kind must be 'net' or 'constant'");
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("invalid architecture: ") + e.what());
    }
  }

  if (j.contains("theta_box")) {
    const json& b = j.at("theta_box");
    check_keys(b, "theta_box", {"lo", "hi"});
    if (b.contains("lo") && b.at("lo").is_array()) {
      cfg.theta_lo_vec = b.at("lo").get<std::vector<double>>();
      cfg.theta_hi_vec = b.at("hi").get<std::vector<double>>();
    } else {
      cfg.theta_lo = number_or(b, "theta_box", "lo", -1.0);
      cfg.theta_hi = number_or(b, "theta_box", "hi", 1.0);
      if (!(cfg.theta_lo < cfg.theta_hi))
        throw ConfigError("theta_box.lo must be below theta_box.hi");
    }
  }

  if (j.contains("objective")) {
    const json& o = j.at("objective");
    check_keys(o, "objective",
               {"horizon", "discount", "rollouts_per_eval", "noise_confidence", "noise_probes",
                "injected_noise", "noise_bound"});
    cfg.objective.horizon = static_cast<int>(number_or(o, "objective", "horizon", 40));
    cfg.objective.discount = number_or(o, "objective", "discount", 0.9);
    cfg.objective.rollouts_per_eval =
        static_cast<int>(number_or(o, "objective", "rollouts_per_eval", 4));
    cfg.objective.noise_confidence = number_or(o, "objective", "noise_confidence", 0.99);
    cfg.objective.noise_probes = static_cast<int>(number_or(o, "objective", "noise_probes", 10));
    cfg.objective.injected_noise = number_or(o, "objective", "injected_noise", 0.0);
    cfg.objective.noise_bound = number_or(o, "objective", "noise_bound", -1.0);
    if (cfg.objective.horizon < 0) throw ConfigError("objective.horizon must be >= 0");
    if (!(cfg.objective.discount >= 0.0 && cfg.objective.discount < 1.0))
      throw ConfigError("objective.discount must lie in [0, 1)");
    if (!(cfg.objective.noise_confidence > 0.0 && cfg.objective.noise_confidence < 1.0))
      throw ConfigError("objective.noise_confidence must lie in (0, 1)");
    if (cfg.objective.injected_noise < 0.0)
      throw ConfigError("objective.injected_noise must be >= 0");
  }

  if (j.contains("trainer")) {
    const json& t = j.at("trainer");
    check_keys(t, "trainer",
               {"steps", "learning_rate", "batch_rollouts", "init_scale", "seed",
                "grad_tolerance", "fd_step"});
    cfg.trainer.steps = static_cast<int>(number_or(t, "trainer", "steps", 300));
    cfg.trainer.learning_rate = number_or(t, "trainer", "learning_rate", 0.05);
    cfg.trainer.batch_rollouts = static_cast<int>(number_or(t, "trainer", "batch_rollouts", 4));
    cfg.trainer.init_scale = number_or(t, "trainer", "init_scale", 0.3);
    cfg.trainer.seed = static_cast<std::uint64_t>(number_or(t, "trainer", "seed", 7));
    cfg.trainer.grad_tolerance = number_or(t, "trainer", "grad_tolerance", 1e-3);
    cfg.trainer.fd_step = number_or(t, "trainer", "fd_step", 1e-3);
    try {
      cfg.trainer.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("invalid trainer config: ") + e.what());
    }
  }

  if (j.contains("surrogate")) {
    const json& s = j.at("surrogate");
    check_keys(s, "surrogate",
               {"c", "eta", "sparse_points", "grid_cap", "feature_budget", "ridge",
                "safety_factor", "feature_seed", "dictionary"});
    cfg.surrogate.c = number_or(s, "surrogate", "c", 0.05);
    cfg.surrogate.eta = number_or(s, "surrogate", "eta", 0.1);
    cfg.surrogate.sparse_points =
        static_cast<std::int64_t>(number_or(s, "surrogate", "sparse_points", 0));
    cfg.surrogate.grid_cap = static_cast<std::int64_t>(number_or(s, "surrogate", "grid_cap", 1000000));
    cfg.surrogate.feature_budget =
        static_cast<int>(number_or(s, "surrogate", "feature_budget", 256));
    cfg.surrogate.ridge = number_or(s, "surrogate", "ridge", 1e-6);
    cfg.surrogate.safety_factor = number_or(s, "surrogate", "safety_factor", 1.5);
    cfg.surrogate.feature_seed =
        static_cast<std::uint64_t>(number_or(s, "surrogate", "feature_seed", 99));
    if (s.contains("dictionary")) {
      for (const auto& kj : s.at("dictionary")) {
        check_keys(kj, "surrogate.dictionary[]", {"type", "bandwidth"});
        KernelSpec spec;
        try {
          spec.type = kernel_type_from_string(kj.at("type").get<std::string>());
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
        if (spec.type == KernelSpec::Type::gaussian)
          spec.bandwidth = require_number(kj, "surrogate.dictionary[]", "bandwidth");
        cfg.surrogate.dictionary.push_back(spec);
      }
    }
    if (!(cfg.surrogate.c > 0.0)) throw ConfigError("surrogate.c must be positive");
    if (!(cfg.surrogate.eta > 0.0)) throw ConfigError("surrogate.eta must be positive");
    if (cfg.surrogate.ridge < 0.0) throw ConfigError("surrogate.ridge must be >= 0");
    if (!(cfg.surrogate.safety_factor >= 1.0))
      throw ConfigError("surrogate.safety_factor must be >= 1");
  }
  if (cfg.surrogate.dictionary.empty()) {
    cfg.surrogate.dictionary = {{KernelSpec::Type::gaussian, 0.5},
                                {KernelSpec::Type::gaussian, 1.0},
                                {KernelSpec::Type::gaussian, 2.0},
                                {KernelSpec::Type::linear, 0.0}};
  }

  if (j.contains("attack")) {
    const json& a = j.at("attack");
    check_keys(a, "attack", {"psi", "b_sep", "constants"});
    cfg.attack.psi = number_or(a, "attack", "psi", 0.04);
    cfg.attack.b_sep = number_or(a, "attack", "b_sep", 0.0);
    if (a.contains("constants")) {
      const json& c = a.at("constants");
      check_keys(c, "attack.constants", {"G", "L", "samples", "seed"});
      cfg.attack.G = number_or(c, "attack.constants", "G", 0.0);
      cfg.attack.L = number_or(c, "attack.constants", "L", 0.0);
      cfg.attack.constant_samples =
          static_cast<int>(number_or(c, "attack.constants", "samples", 200));
      cfg.attack.constants_seed =
          static_cast<std::uint64_t>(number_or(c, "attack.constants", "seed", 11));
    }
    if (!(cfg.attack.psi > 0.0)) throw ConfigError("attack.psi must be positive");
    if (cfg.attack.b_sep < 0.0) throw ConfigError("attack.b_sep must be >= 0");
    // The separation radius must keep the parameter-to-action conversion
    // valid: b_sep <= psi / G. Checked here when G is pinned in config,
    // re-checked at the enumeration stage against the estimated G.
    if (cfg.attack.G > 0.0 && cfg.attack.b_sep > 0.0 &&
        cfg.attack.b_sep > cfg.attack.psi / cfg.attack.G * (1.0 + 1e-12))
      throw ConfigError("attack.b_sep exceeds psi / G");
  }

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    check_keys(s, "solver",
               {"backend", "delta", "max_candidates", "max_boxes", "max_restarts",
                "descent_iters", "seed"});
    try {
      cfg.solver.backend = backend_from_string(string_or(s, "solver", "backend", "interval_bnp"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    cfg.solver.delta = number_or(s, "solver", "delta", 1e-3);
    cfg.solver.max_candidates = static_cast<int>(number_or(s, "solver", "max_candidates", 50000));
    cfg.solver.max_boxes = static_cast<std::int64_t>(number_or(s, "solver", "max_boxes", 2000000));
    cfg.solver.max_restarts = static_cast<int>(number_or(s, "solver", "max_restarts", 200));
    cfg.solver.descent_iters = static_cast<int>(number_or(s, "solver", "descent_iters", 400));
    cfg.solver.seed = static_cast<std::uint64_t>(number_or(s, "solver", "seed", 5));
    try {
      cfg.solver.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("invalid solver config: ") + e.what());
    }
  }

  if (j.contains("online")) {
    const json& o = j.at("online");
    check_keys(o, "online", {"observations", "trajectory_seed", "sweep_samples", "sweep_seed"});
    cfg.online.observations = static_cast<int>(number_or(o, "online", "observations", 150));
    cfg.online.trajectory_seed =
        static_cast<std::uint64_t>(number_or(o, "online", "trajectory_seed", 3));
    cfg.online.sweep_samples = static_cast<int>(number_or(o, "online", "sweep_samples", 10000));
    cfg.online.sweep_seed = static_cast<std::uint64_t>(number_or(o, "online", "sweep_seed", 17));
    if (cfg.online.observations < 0) throw ConfigError("online.observations must be >= 0");
    if (cfg.online.sweep_samples < 1) throw ConfigError("online.sweep_samples must be >= 1");
  }

  return cfg;
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_fingerprint(const std::string& text) {
  // Canonicalize through the JSON object so formatting differences wash out.
  std::string canonical;
  try {
    canonical = json::parse(text).dump();
  } catch (const json::parse_error&) {
    canonical = text;
  }
  const std::uint64_t h = fnv1a(canonical.data(), canonical.size());
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

}  // namespace rlex
