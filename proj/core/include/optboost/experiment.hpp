#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "optboost/dataset.hpp"
#include "optboost/dynamics.hpp"

namespace optboost {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitCompleted = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitHalted = 2;

struct DatasetSpec {
  std::filesystem::path path;  // resolved against the config file's directory
  LabelColumn label_column = std::string("label");
  LabelMapping label_mapping = signed_label_mapping();
};

struct SplitSpec {
  double test_fraction = 0.5;
  std::uint64_t seed = 0;
};

struct DiagnosticToggles {
  bool tie_gap = true;
  bool margins = true;
  bool support_vectors = true;
  bool cycles = true;
  bool birkhoff = true;
  bool test_error = true;
  bool dump_matrix = false;
  bool dump_segments = false;
};

struct ExperimentConfig {
  std::string run_id;
  DatasetSpec dataset;
  std::optional<SplitSpec> split;
  InitMode init = UniformInit{};
  std::size_t rounds = 0;
  double equivalence_eps = 1e-15;
  double tie_tol = 0.0;
  bool include_constant = false;
  SnapshotSchedule snapshots;
  // Log-spaced checkpoint density for margins, test error and frequencies.
  std::size_t checkpoints_per_decade = 20;
  // Rounds with a full margin/histogram dump; T is always added.
  std::vector<std::size_t> margin_rounds{1000, 10000, 20000, 40000, 90000, 100000};
  DiagnosticToggles diagnostics;
  double cycle_tol = 1e-9;
  std::size_t cycle_max_period = 1000;
  double support_weight_tol = 1e-8;
  double support_margin_tol = 1e-2;
  std::filesystem::path output_dir;
  // Hash of the canonical form of the config document.
  std::string config_hash;
};

// Parses the JSON config. Relative paths are resolved against base_dir.
// Throws ConfigError.
ExperimentConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ExperimentOutcome {
  int exit_code = kExitCompleted;
  HaltReason halt;
  std::filesystem::path output_dir;
};

// Runs the configured experiment and writes rounds.csv, margins_T<T>.csv,
// histogram_T<T>.csv, diagnostics.csv, test_error.csv (with a split),
// summary.json and, on a halt, error.json. Output is a pure function of the
// config. Throws ConfigError / DataError for unusable inputs.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

// Human-readable digest of an output directory's summary.json.
std::string inspect(const std::filesystem::path& output_dir);

// Checkpoint rounds used for a run of T rounds.
std::vector<std::size_t> checkpoint_rounds(const ExperimentConfig& config);

}  // namespace optboost
