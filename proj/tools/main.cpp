// Command line front end for the controller-extraction pipeline. Stages are
// independently re-runnable and communicate only through files in the run
// directory; see README.md for the walkthrough.

#include "rlex/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

rlex::RunConfig load_or_die(const std::string& config_path) {
  return rlex::load_config(config_path);
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const rlex::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return rlex::kExitConfigError;
  } catch (const rlex::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return rlex::kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return rlex::kExitInvariant;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model extraction toolkit for RL-trained feedback controllers"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_path;
  std::string candidates_path, trajectory_path;
  double psi_override = -1.0;
  int sweep_samples = 0;

  auto* init = app.add_subcommand("config-init", "Print the default configuration");
  init->add_option("-o,--output", output_path, "Write to a file instead of stdout");

  auto add_config = [&config_path](CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "Run configuration (JSON)")->required();
  };

  auto* train = app.add_subcommand("train", "Train the victim policy and dump its trajectory");
  add_config(train);
  auto* sample = app.add_subcommand("sample", "Grid-sample finite-difference gradient estimates");
  add_config(sample);
  auto* fit = app.add_subcommand("fit", "Fit the kernel surrogate and assemble the error budget");
  add_config(fit);
  auto* enumerate_cmd =
      app.add_subcommand("enumerate", "Enumerate separated candidate parameter vectors");
  add_config(enumerate_cmd);
  auto* filter = app.add_subcommand("filter", "Shortlist candidates against observations");
  add_config(filter);
  filter->add_option("--candidates", candidates_path, "Candidate file override (JSONL)");
  filter->add_option("--trajectory", trajectory_path, "Observation CSV override");
  filter->add_option("--psi", psi_override, "Threshold override");
  auto* evaluate_cmd =
      app.add_subcommand("evaluate", "Sweep shortlisted candidates over the state space");
  add_config(evaluate_cmd);
  evaluate_cmd->add_option("--samples", sweep_samples, "State sample count override");
  auto* report = app.add_subcommand("report", "Assemble the experiment report");
  add_config(report);

  CLI11_PARSE(app, argc, argv);

  if (init->parsed()) {
    return guarded([&]() {
      const std::string text = rlex::default_config_text();
      if (output_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(output_path);
        if (!out) throw rlex::ConfigError("cannot write " + output_path);
        out << text;
      }
      return rlex::kExitOk;
    });
  }

  return guarded([&]() {
    const rlex::RunConfig cfg = load_or_die(config_path);
    if (train->parsed()) return rlex::run_train(cfg, std::cout);
    if (sample->parsed()) return rlex::run_sample(cfg, std::cout);
    if (fit->parsed()) return rlex::run_fit(cfg, std::cout);
    if (enumerate_cmd->parsed()) return rlex::run_enumerate(cfg, std::cout);
    if (filter->parsed()) {
      rlex::FilterOverrides overrides;
      if (!candidates_path.empty()) overrides.candidates = candidates_path;
      if (!trajectory_path.empty()) overrides.trajectory = trajectory_path;
      if (psi_override > 0.0) overrides.psi = psi_override;
      return rlex::run_filter(cfg, overrides, std::cout);
    }
    if (evaluate_cmd->parsed()) return rlex::run_evaluate(cfg, sweep_samples, std::cout);
    if (report->parsed()) return rlex::run_report(cfg, std::cout);
    return rlex::kExitConfigError;
  });
}
