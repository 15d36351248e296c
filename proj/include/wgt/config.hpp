#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wgt/engine.hpp"
#include "wgt/graph.hpp"
#include "wgt/weights.hpp"

namespace wgt {

inline constexpr int kConfigSchema = 1;

struct AttackSettings {
  AgentIndex target = 0;  // internal index; agent ids in files are 1-based
  double stabilization_tolerance = 1e-10;
  std::size_t stabilization_window = 50;
  std::size_t audit_horizon = 3;
};

struct SweepGrid {
  std::vector<double> alpha;
  std::vector<double> lambda_e;
  std::vector<double> lambda_m;
  std::vector<std::uint64_t> seeds;  // each seed s sets objective seed s and init seed s + 1000

  bool empty() const noexcept {
    return alpha.empty() && lambda_e.empty() && lambda_m.empty();
  }
};

/// Everything needed to rebuild a run. See README.md for the file format.
struct ScenarioConfig {
  int schema = kConfigSchema;

  std::string graph_preset = "ring6_chords";  // empty when an explicit edge list is given
  std::size_t agents = 0;                     // explicit graphs only
  std::vector<Edge> edges;                    // explicit graphs only, internal indices

  WeightScheme weight_scheme = WeightScheme::uniform;
  double weight_jitter = 0.0;
  std::uint64_t weight_seed = 0;

  std::size_t rows = 3;
  std::size_t dim = 2;
  double regularization = 0.01;
  std::uint64_t objective_seed = 1;

  Mode mode = Mode::wgt;
  std::vector<double> alpha{0.1};  // one entry means the same step for every agent
  std::optional<double> lambda_constant;
  double lambda_e = 0.8;
  double lambda_m = 10.0;
  std::size_t iterations = 2000;
  std::uint64_t init_seed = 2;

  double threshold = 1e-6;
  std::string output_dir = "out";
  std::size_t admissibility_horizon = 200;
  std::size_t export_matrices = 0;  // write A_k, B_k for k = 1..this many to matrices.csv
  bool dump_ensemble = false;       // write S_i, s_i, r_i to ensemble.csv

  AttackSettings attack;
  SweepGrid sweep;
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
ScenarioConfig parse_config(const nlohmann::json& doc);
/// Throws std::system_error (missing or unreadable file) or ConfigError.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Fully resolved config; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const ScenarioConfig& c);

DirectedGraph build_graph(const ScenarioConfig& c);
LambdaSchedule build_lambda(const ScenarioConfig& c);
/// Builds and validates the scenario. Throws ConfigError.
Scenario build_scenario(const ScenarioConfig& c);

}  // namespace wgt
