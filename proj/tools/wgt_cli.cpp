#include <iostream>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "wgt/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Weighted gradient tracking simulator"};
  app.require_subcommand(1);

  std::string config;
  wgt::Overrides overrides;

  const std::pair<const char*, const char*> commands[] = {
      {"run", "simulate one scenario and write report.csv / report.json"},
      {"sweep", "run the configured parameter grid and check monotonicity"},
      {"attack", "gradient inference by an honest-but-curious neighbor"},
      {"audit", "rank and nullity of the eavesdropper's equation systems"},
      {"validate", "parse and check a config without running it"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config, "scenario config file (JSON)")->required();
    sub->add_option("-o,--output-dir", overrides.output_dir, "directory for report files");
    sub->add_option("--seed", overrides.objective_seed, "objective seed");
    sub->add_option("--init-seed", overrides.init_seed, "initial-state seed");
    sub->add_option("--weight-seed", overrides.weight_seed, "weight-dithering seed");
    sub->add_option("--threshold", overrides.threshold, "residual threshold");
    sub->add_option("--target", overrides.target, "attacked agent (1-based)");
    sub->add_option("-K,--iterations", overrides.iterations, "number of iterations");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : wgt::kExitUsage;
  }
  return wgt::dispatch(app.get_subcommands().front()->get_name(), config, overrides, std::cout,
                       std::cerr);
}
