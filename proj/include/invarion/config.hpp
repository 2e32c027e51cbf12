#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "invarion/channel.hpp"
#include "invarion/cover.hpp"
#include "invarion/linear.hpp"
#include "invarion/region.hpp"
#include "invarion/system.hpp"

namespace invarion {

struct ControlSpec {
  // Either uniform levels on [lower, upper] per input, or explicit values.
  std::vector<double> lower{-1.0};
  std::vector<double> upper{1.0};
  std::size_t levels = 33;
  std::vector<std::vector<double>> values;
};

struct SystemSpec {
  enum class Kind { kLinear, kCircle };
  Kind kind = Kind::kLinear;
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  int alpha = 2;
  ControlSpec controls;

  std::size_t state_dim() const { return kind == Kind::kCircle ? 1 : A.rows(); }
};

struct RegionSpec {
  std::string shape = "box";  // box | circle | circle_band | ball | linear_image
  std::vector<double> lower, upper, center;
  double delta = 0.1;
  double radius = 1.0;
  Eigen::MatrixXd map;
  std::size_t resolution = 2;
  std::optional<double> margin;
};

struct SimulationSpec {
  std::string mode = "single";  // single | network
  std::size_t tau = 1;
  std::size_t horizon = 100;
  std::vector<std::size_t> channels;  // indices into ScenarioConfig::channels, one per link
  std::string adversary = "seeded-random";  // exhaustive | seeded-random | greedy-escape
  std::vector<State> x0;
  std::size_t x0_samples = 0;  // extra seeded grid points
  std::size_t max_adversaries = 64;
};

/// A scenario: system, target region, solver settings, channels and
/// simulation. Loaded from a JSON document; every field error names its path.
struct ScenarioConfig {
  std::string name;
  std::vector<SystemSpec> systems;
  RegionSpec region;
  std::vector<std::size_t> taus;
  SolveMode mode = SolveMode::kExact;
  std::uint64_t pool_cap = std::uint64_t{1} << 20;
  std::uint64_t seed = 0;
  std::uint64_t node_budget = 50'000'000;
  std::vector<std::size_t> subsystems;  // components for subsystem-entropy
  std::size_t frontier_max_words = 256;
  std::size_t refine_rounds = 2;
  bool frontier_exact = false;
  std::vector<Channel> channels;
  std::size_t capacity_k_max = 2;
  std::optional<SimulationSpec> simulation;
  std::optional<RegionSpec> absorbing;  // K for the strong-invariance check
  std::optional<std::size_t> threads;
  std::string output_dir = "out";
  std::uint64_t config_hash = 0;
  nlohmann::json source;
};

/// Parses and validates; throws ConfigError with the offending field path.
ScenarioConfig parse_config(const nlohmann::json& document);
ScenarioConfig load_config(const std::filesystem::path& path);

SystemDef build_system(const ScenarioConfig& config);
SystemDef build_system(const SystemSpec& spec);
GridRegion build_region(const RegionSpec& spec);
std::vector<LinearPair> linear_pairs(const ScenarioConfig& config);

/// Channel from {"alphabet": [...], "relation": {symbol: [symbols]}} or a
/// preset {"preset": "noiseless" | "all_confusable" | "pentagon", "size": n}.
Channel parse_channel(const nlohmann::json& j, const std::string& path);

/// 64-bit FNV-1a of the byte string.
std::uint64_t fnv1a(const std::string& bytes);

/// FNV-1a of the canonical (key-sorted, compact) serialization.
std::uint64_t config_hash(const nlohmann::json& document);

std::string hex64(std::uint64_t v);

}  // namespace invarion
