// optboost: run boosting-dynamics experiments, generate synthetic data and
// summarize result directories.
//
//   optboost run <config.json>
//   optboost synth <two_gaussians|rudin3|xor_grid> --out data.csv [--seed N]
//   optboost inspect <output-dir>
//
// Exit codes: 0 completed, 2 halted by the dynamics, 1 usage/config error.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "optboost/experiment.hpp"
#include "optboost/synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Optimal AdaBoost dynamics experiments"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment from a JSON config");
  run_cmd->add_option("config", config_path, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);

  std::string kind;
  std::string out_path;
  std::uint64_t seed = 1;
  optboost::SynthParams params;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic dataset as CSV");
  synth_cmd->add_option("kind", kind, "two_gaussians, rudin3 or xor_grid")->required();
  synth_cmd->add_option("-o,--out", out_path, "Output CSV path")->required();
  synth_cmd->add_option("--seed", seed, "Random seed");
  synth_cmd->add_option("--m", params.m, "two_gaussians: number of examples");
  synth_cmd->add_option("--separation", params.separation,
                        "two_gaussians: distance between class means per axis");
  synth_cmd->add_option("--per-side", params.per_side, "xor_grid: grid points per side");
  synth_cmd->add_option("--jitter", params.jitter, "xor_grid: jitter as a fraction of a cell");

  std::string inspect_dir;
  auto* inspect_cmd = app.add_subcommand("inspect", "Summarize an output directory");
  inspect_cmd->add_option("dir", inspect_dir, "Experiment output directory")
      ->required()
      ->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : optboost::kExitUsage;
  }

  try {
    if (*run_cmd) {
      const auto config = optboost::load_config(config_path);
      const auto outcome = optboost::run_experiment(config);
      std::cout << optboost::inspect(outcome.output_dir);
      if (outcome.exit_code != optboost::kExitCompleted) {
        std::cerr << "halted: " << optboost::to_string(outcome.halt.kind) << " at t="
                  << outcome.halt.t << " (see " << (outcome.output_dir / "error.json").string()
                  << ")\n";
      }
      return outcome.exit_code;
    }
    if (*synth_cmd) {
      optboost::synth(optboost::parse_synth_kind(kind), params, seed, out_path);
      std::cout << "wrote " << out_path << '\n';
      return optboost::kExitCompleted;
    }
    if (*inspect_cmd) {
      std::cout << optboost::inspect(inspect_dir);
      return optboost::kExitCompleted;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return optboost::kExitUsage;
  }
  return optboost::kExitUsage;
}
