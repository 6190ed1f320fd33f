#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "onebit/harness.hpp"

namespace {

// Exit codes: 0 all gates pass, 1 any gate fails, 2 usage/input error.
constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

}  // namespace

int main(int argc, char** argv) {
  onebit::ExperimentConfig config;
  std::string format = "csv";

  CLI::App app{"Optimal one-bit quantization experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", config.seed, "RNG seed (printed in every report)");
  app.add_option("--samples", config.samples, "Monte Carlo sample count");
  app.add_option("--grid-n", config.grid_n, "path grid size");
  app.add_option("--out", config.out_path, "output path");
  app.add_option("--format", format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* table = app.add_subcommand(
      "amenability-table", "analytic vs Monte Carlo amenability of standard sources");
  table->add_option("--eps", config.eps, "extra x(eps,delta) row: eps");
  table->add_option("--delta", config.delta, "extra x(eps,delta) row: delta");

  app.add_subcommand("counterexample",
                     "three-point source where the best quantizer is asymmetric");

  auto* lap = app.add_subcommand(
      "laplace2d", "direction search for a pair of independent Laplace variables");
  lap->add_option("--angles", config.angles, "grid search angle count");
  lap->add_option("--min-cell", config.min_cell, "empirical sweep cell minimum");

  auto* saw = app.add_subcommand(
      "sawbridge", "stationary sawbridge eigensystem, quantizer and independence checks");
  saw->add_option("--num-paths", config.num_paths, "Monte Carlo path count");
  saw->add_option("--k-max", config.k_max, "KL truncation order");
  saw->add_option("--num-directions", config.num_directions,
                  "random directions for the theta-regime checks");
  saw->add_option("--num-runs", config.num_runs,
                  "seeded repetitions of the chi-square gate");
  saw->add_option("--export-paths", config.export_paths,
                  "write sample paths to this csv, one row per path");
  saw->add_option("--export-count", config.export_count,
                  "how many paths to export");

  auto* contour = app.add_subcommand(
      "contour", "bit of the optimal quantizer over a drop x phase grid");
  contour->add_option("--compare", config.compare_path,
                      "external bit matrix csv for side-by-side comparison");

  auto* emp = app.add_subcommand("empirical-vardrop",
                                 "variance-drop sweep over a sample csv");
  emp->add_option("--input", config.input_path, "one-column sample csv");
  emp->add_option("--min-cell", config.min_cell, "empirical sweep cell minimum");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  config.format = format == "json" ? onebit::ExperimentConfig::Format::json
                                   : onebit::ExperimentConfig::Format::csv;

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    const onebit::Report report = onebit::run_command(name, config);
    std::cout << report.to_json(config, false).dump(2) << std::endl;
    return report.all_pass ? kExitPass : kExitFail;
  } catch (const onebit::UsageError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitUsage;
  }
}
