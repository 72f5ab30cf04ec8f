#pragma once

#include "config.hpp"
#include "table.hpp"

#include "mcsuite/core.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace mcsuite::cli {

struct SchemaKey {
  std::string key;
  std::string default_value;
  std::string doc;
};

struct ExperimentOutput {
  ResultTable main;
  std::vector<std::pair<std::string, ResultTable>> extras;  // file stem -> table
  std::string summary;                                      // printed to stdout
};

struct ExperimentSpec {
  std::string name;
  std::string description;
  std::vector<SchemaKey> schema;
  std::function<ExperimentOutput(const Config&, const std::string& out_dir)> run;
};

const std::vector<ExperimentSpec>& experiments();
const ExperimentSpec& find_experiment(const std::string& name);

// Default config text for an experiment, one documented key per line.
std::string default_config_text(const ExperimentSpec& spec);

// Unknown or missing keys raise ConfigError naming the key.
void validate_config(const ExperimentSpec& spec, const Config& config);

// Validates, runs, and writes results.csv, results.json, one CSV per extra
// table and timing.json into out_dir.
ExperimentOutput run_experiment(const std::string& name, const Config& config,
                                const std::string& out_dir);

// Shared fixtures, also used by the acceptance suite.
namespace fixtures {

// x^4 - x^2 - 0.4 x
double sa_potential(double x);
// Global minimizer of sa_potential (root of 4x^3 - 2x - 0.4 near 0.8).
double sa_minimizer();
// h (x^2 - 1)^2
double double_well(double x, double h);
TargetDensity beta_target(double a, double b);
SampleableDensity uniform01_proposal();
TargetDensity standard_normal_target(int d);

}  // namespace fixtures

}  // namespace mcsuite::cli
