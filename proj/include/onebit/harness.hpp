#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "onebit/scalar_quant.hpp"
#include "onebit/sources.hpp"

namespace onebit {

/// Everything a subcommand needs; identical configs produce byte-identical
/// output files.
struct ExperimentConfig {
  std::uint64_t seed = 20220816;
  Eigen::Index samples = 1000000;
  Eigen::Index grid_n = 1024;
  std::string out_path;  // per-command default when empty
  enum class Format { csv, json };
  Format format = Format::csv;

  int angles = 360;
  Eigen::Index num_paths = 100000;
  Eigen::Index k_max = 16;
  Eigen::Index min_cell = 8;
  double eps = 0.1;
  double delta = 0.01;
  Eigen::Index num_directions = 200;
  int num_runs = 20;         // repeated seeded runs for the chi-square gate
  std::string input_path;    // empirical-vardrop sample csv
  std::string compare_path;  // contour: external bit matrix for comparison
  std::string export_paths;  // sawbridge: write sample paths here as csv
  Eigen::Index export_count = 64;
};

/// One gated statistic of a report.
struct CheckRecord {
  std::string statistic;
  double value;
  double threshold;
  bool pass;
};

struct Report {
  std::string command;
  std::string out_path;                // file actually written
  nlohmann::ordered_json payload;      // command-specific data
  std::vector<CheckRecord> checks;
  bool all_pass = true;

  /// schema/version/config envelope plus checks; payload included when
  /// with_payload is set.
  nlohmann::ordered_json to_json(const ExperimentConfig& config,
                                 bool with_payload) const;
};

/// Thrown for malformed inputs and unusable paths; the CLI maps it to
/// exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Report cmd_amenability_table(const ExperimentConfig& config);
Report cmd_counterexample(const ExperimentConfig& config);
Report cmd_laplace2d(const ExperimentConfig& config);
Report cmd_sawbridge(const ExperimentConfig& config);
Report cmd_contour(const ExperimentConfig& config);
Report cmd_empirical_vardrop(const ExperimentConfig& config);

/// Dispatch by subcommand name.
Report run_command(const std::string& name, const ExperimentConfig& config);

/// Exhaustive search over the contiguous bipartitions of a discrete source
/// with Lloyd reconstructions, scoring each split by directly summed mse.
/// Independent of the sweep's stabilized-ratio evaluation.
VardropResult discrete_bipartition_search(const AnalyticSource& src);

std::string version_string();

}  // namespace onebit
