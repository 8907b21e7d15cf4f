#pragma once

// Command-line front end: calibrate, run <experiment>, synth, trace.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aircap/experiments.hpp"

namespace aircap {

/// Scenario file contents. Relative paths are resolved against the
/// directory of the scenario file. Unknown keys are rejected.
struct ScenarioConfig {
  std::optional<std::filesystem::path> records;
  std::optional<std::filesystem::path> financials;
  std::optional<std::filesystem::path> model;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::filesystem::path> synthetic_spec;
  std::optional<nlohmann::json> coeffs;
  double s = 500.0;
  double alpha = 60000.0;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::optional<Grid> capacity_grid;
  bool cap_at_C_init = false;
  std::optional<std::vector<double>> capacities;
  std::optional<std::vector<double>> nf_values;
  std::optional<std::vector<double>> k_values;
  std::optional<std::vector<double>> s_values;
  std::optional<double> fixed_capacity;
  std::optional<double> eval_capacity;
  double delta_C = 1.0;
  std::vector<std::pair<std::string, std::filesystem::path>> airports;
  ExploratorySpendParams exploratory;
  int trace_hour = 12;
  std::optional<double> trace_capacity;
  std::optional<Grid> trace_grid;
};

ScenarioConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Names accepted by `run`.
const std::vector<std::string>& experiment_names();

/// Exit codes: 0 success, 1 numerical failure, 2 usage, validation or I/O.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aircap
