#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "parkcast/harness.hpp"
#include "parkcast/synth.hpp"

namespace parkcast {

/// One experiment = one config file of dotted `key = value` lines
/// ('#' comments). Flags may override single keys; every artifact records
/// the hash of the effective configuration.
struct ExperimentConfig {
  std::uint64_t seed = 42;
  std::string out_dir = "out";

  // Input paths; cmd_synth fills them with its own outputs by default.
  std::string parking_path;
  std::string lots_path;  // lot_id,x,y table
  std::array<std::string, kNumModes> trip_paths;

  SynthConfig synth;
  PipelineConfig pipeline;

  // Model.
  std::int64_t d_model = 64;
  std::int64_t n_heads = 4;
  std::int64_t n_layers = 2;
  std::int64_t d_ff = 128;
  std::string calendar = "hour,week";
  double dropout = 0.0;

  // Training.
  int epochs = 5;
  int batch = 32;
  double lr = 1e-3;
  int train_setting = 1;

  // Baselines.
  int ar_p = 6;
  int ar_d = 1;

  // Evaluation.
  std::vector<std::size_t> horizons = {1, 6, 36, 72, 144};
  std::vector<int> settings = {1, 2, 3, 4};
  std::vector<std::uint64_t> ablation_seeds = {1};
  double mape_epsilon = 1e-3;

  ModelConfig model_config() const;
  TrainOptions train_options() const;
};

/// The flat key=value view after file parsing and overrides.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap read_config_file(const std::string& path);

/// Applies `key=value` override strings on top of a map.
void apply_overrides(ConfigMap& map, const std::vector<std::string>& overrides);

/// Builds the typed config; unknown keys are an error so typos fail loudly.
ExperimentConfig config_from_map(const ConfigMap& map);

/// Canonical serialization of the effective config (sorted keys).
std::string canonical_config(const ExperimentConfig& config);

/// FNV-1a hash of the canonical form, as fixed-width hex.
std::string config_hash(const ExperimentConfig& config);

constexpr const char* kToolVersion = "parkcast 0.1.0";

/// JSON fragment stamped into every artifact.
std::string provenance_json(const ExperimentConfig& config);

}  // namespace parkcast
