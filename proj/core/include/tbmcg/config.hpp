#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tbmcg/algorithm.hpp"
#include "tbmcg/anc.hpp"
#include "tbmcg/noise.hpp"
#include "tbmcg/sysid.hpp"

namespace tbmcg {

inline constexpr int kConfigSchemaVersion = 1;

struct SweepConfig {
  SysidConfig base;
  AlgorithmSpec tbmcg;
  std::vector<double> c_values;
};

using ExperimentConfig = std::variant<SysidConfig, SweepConfig, AncConfig>;

/// Parses a config document. `base_dir` anchors relative path-file names.
/// Unknown keys are rejected so typos do not silently fall back to defaults.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& file);

/// Fully resolved config (every default spelled out, path coefficients
/// inlined). Used for metadata and for the output-directory hash.
nlohmann::json to_json(const ExperimentConfig& config);

AlgorithmSpec parse_algorithm(const nlohmann::json& doc);
nlohmann::json to_json(const AlgorithmSpec& spec);
NoiseSpec parse_noise(const nlohmann::json& doc);
nlohmann::json to_json(const NoiseSpec& spec);

/// 16 hex digits of FNV-1a over the compact dump of `doc`.
std::string config_hash(const nlohmann::json& doc);

/// Experiment name as written in the config ("sysid", "sweep-c", "anc").
std::string experiment_kind(const ExperimentConfig& config);

/// Override helpers shared by the CLI.
void override_seed(ExperimentConfig& config, std::uint64_t seed);
void override_runs(ExperimentConfig& config, std::size_t runs);
void override_iterations(ExperimentConfig& config, std::size_t iterations);
void override_jobs(ExperimentConfig& config, std::size_t jobs);

}  // namespace tbmcg
