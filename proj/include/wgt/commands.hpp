#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wgt/config.hpp"

namespace wgt {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,  // bad command line, missing or unreadable file
  kExitConfig = 2,
  kExitDivergence = 3,
  kExitInconclusive = 4,
};

struct Overrides {
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> objective_seed;
  std::optional<std::uint64_t> init_seed;
  std::optional<std::uint64_t> weight_seed;
  std::optional<double> threshold;
  std::optional<std::size_t> target;  // 1-based
  std::optional<std::size_t> iterations;
};

/// Throws ConfigError if an override is out of range.
void apply_overrides(ScenarioConfig& c, const Overrides& o);

struct SweepCell {
  double alpha = 0.0;
  double lambda_e = 0.0;
  double lambda_m = 0.0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> iterations_to_threshold;
  double terminal_residual = 0.0;
  std::string status = "ok";  // ok, diverged, error
  std::string detail;
};

/// One ordering rule checked on one slice of the grid: per seed the counts
/// must be monotone along `axis` (runs that never reach the threshold count
/// as infinite); the slice passes when a strict majority of seeds agree.
struct MonotonicityCheck {
  std::string axis;        // "alpha" (nonincreasing) or "lambda_e" (nondecreasing)
  std::string slice;       // the parameters held fixed
  std::size_t points = 0;  // grid points along the axis
  std::size_t seeds_agreeing = 0;
  std::size_t seeds = 0;
  bool holds = false;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // grid order: alpha, lambda_e, lambda_m, seed (last fastest)
  std::vector<MonotonicityCheck> checks;
};

/// Cells run concurrently on `threads` workers (0 = hardware concurrency).
/// Throws ConfigError on an empty grid.
SweepResult run_sweep(const ScenarioConfig& c, unsigned threads = 0);
std::string sweep_csv(const SweepResult& r);

int run_command(const ScenarioConfig& c, std::ostream& out);
int sweep_command(const ScenarioConfig& c, std::ostream& out);
int attack_command(const ScenarioConfig& c, std::ostream& out);
int audit_command(const ScenarioConfig& c, std::ostream& out);
int validate_command(const ScenarioConfig& c, std::ostream& out);

/// Loads the config, applies overrides, runs `command`, and maps failures to
/// exit codes with a one-line message on `err`.
int dispatch(const std::string& command, const std::filesystem::path& config,
             const Overrides& overrides, std::ostream& out, std::ostream& err);

}  // namespace wgt
