// mcsuite: run the experiment harness from the command line.
//
//   mcsuite run <experiment> --config <path> [--seed S] [--set key=value ...] --out <dir>
//   mcsuite list
//   mcsuite defaults <experiment>
//
// Exit status: 0 success, 2 config error, 1 runtime error.

#include "config.hpp"
#include "experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  using namespace mcsuite::cli;

  CLI::App app{"Monte Carlo sampling experiments"};
  app.require_subcommand(1);

  std::string name, config_path, out_dir, seed;
  std::vector<std::string> overrides;
  auto* run = app.add_subcommand("run", "run one experiment and write its result files");
  run->add_option("experiment", name, "experiment name")->required();
  run->add_option("--config", config_path, "config file")->required();
  run->add_option("--seed", seed, "override the seed key");
  run->add_option("--set", overrides, "key=value override, applied after the file");
  run->add_option("--out", out_dir, "output directory")->required();

  app.add_subcommand("list", "list experiments and their config keys");

  std::string defaults_name;
  auto* defaults = app.add_subcommand("defaults", "print the default config for an experiment");
  defaults->add_option("experiment", defaults_name, "experiment name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("list")) {
      for (const auto& spec : experiments()) {
        std::cout << spec.name << "  " << spec.description << "\n";
        for (const auto& k : spec.schema) {
          std::cout << "    " << k.key << " = " << k.default_value << "  (" << k.doc << ")\n";
        }
      }
      return 0;
    }
    if (app.got_subcommand("defaults")) {
      std::cout << default_config_text(find_experiment(defaults_name));
      return 0;
    }
    Config config = Config::load(config_path);
    if (!seed.empty()) config.set("seed", seed);
    for (const auto& o : overrides) config.apply_override(o);
    const ExperimentOutput out = run_experiment(name, config, out_dir);
    std::cout << name << ": " << out.summary << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
