#include "ird/harness.hpp"
#include "ird/oracle_checks.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

ird::ExperimentConfig base_config(const std::string& config_path) {
  ird::ExperimentConfig cfg;
  if (!config_path.empty()) {
    const auto kv = ird::parse_config_text(ird::read_text_file(config_path));
    ird::apply_config(cfg, kv);
  }
  return cfg;
}

void print_row_summary(const ird::RunMetrics& row) {
  std::printf("%-17s %-9s ok %3d/%3d  lava_fraction %.6f  mean_lava_cells %.6f\n",
              ird::condition_name(row.condition),
              ird::agent_mode_name(row.mode), row.n_maps_ok,
              row.n_maps_requested, row.lava_fraction, row.mean_lava_cells);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reward inference and risk-averse planning experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand(
      "run", "Run one experiment condition under one agent mode");
  std::string run_condition;
  std::string run_mode = "maxent-z";
  std::string run_out = "results.csv";
  std::string run_config;
  int run_maps = 100;
  std::uint64_t run_seed = 0;
  run->add_option("--condition", run_condition,
                  "side-effects|reward-hacking|latent-raw|latent-classifier")
      ->required();
  run->add_option("--mode", run_mode, "literal|sample-z|maxent-z");
  run->add_option("--maps", run_maps, "number of evaluation maps");
  run->add_option("--seed", run_seed, "master seed");
  run->add_option("--out", run_out, "output CSV path");
  run->add_option("--config", run_config, "key=value configuration file");

  auto* fact = app.add_subcommand(
      "factorial", "Run every condition under every agent mode");
  std::string fact_out;
  std::string fact_config;
  int fact_maps = 100;
  std::uint64_t fact_seed = 0;
  bool fact_timing = false;
  fact->add_option("--maps", fact_maps, "number of evaluation maps per cell");
  fact->add_option("--seed", fact_seed, "master seed");
  fact->add_option("--out", fact_out, "output directory")->required();
  fact->add_option("--config", fact_config, "key=value configuration file");
  fact->add_flag("--timing", fact_timing,
                 "record wall-clock time per cell (off by default so repeated "
                 "runs produce byte-identical outputs)");

  auto* oracle = app.add_subcommand(
      "oracle-check", "Cross-check planners and inference against full "
                      "trajectory enumeration");
  std::uint64_t oracle_seed = 0;
  oracle->add_option("--seed", oracle_seed, "master seed");

  auto* post = app.add_subcommand(
      "posterior", "Sample and dump the posterior for one map");
  std::string post_condition;
  std::string post_mode = "maxent-z";
  std::string post_out = "posterior.json";
  std::string post_config;
  int post_map_index = 0;
  std::uint64_t post_seed = 0;
  post->add_option("--condition", post_condition,
                   "side-effects|reward-hacking|latent-raw|latent-classifier")
      ->required();
  post->add_option("--mode", post_mode, "sample-z|maxent-z");
  post->add_option("--map-index", post_map_index, "which map to analyze");
  post->add_option("--seed", post_seed, "master seed");
  post->add_option("--out", post_out, "output JSON path");
  post->add_option("--config", post_config, "key=value configuration file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      ird::ExperimentConfig cfg = base_config(run_config);
      cfg.condition = ird::parse_condition(run_condition);
      if (run->count("--mode") > 0 || run_config.empty()) {
        cfg.mode = ird::parse_agent_mode(run_mode);
      }
      if (run->count("--maps") > 0) cfg.n_test_maps = run_maps;
      if (run->count("--seed") > 0) cfg.master_seed = run_seed;
      const ird::RunMetrics row = ird::run_condition(cfg);
      ird::write_text_file(run_out, ird::results_to_csv({row}));
      print_row_summary(row);
      std::printf("wrote %s\n", run_out.c_str());
      return 0;
    }

    if (*fact) {
      ird::ExperimentConfig cfg = base_config(fact_config);
      if (fact->count("--maps") > 0) cfg.n_test_maps = fact_maps;
      if (fact->count("--seed") > 0) cfg.master_seed = fact_seed;
      cfg.record_wall_time = fact_timing;
      const std::vector<ird::RunMetrics> rows = ird::run_factorial(cfg);
      std::filesystem::create_directories(fact_out);
      const auto csv_path =
          (std::filesystem::path(fact_out) / "results.csv").string();
      const auto json_path =
          (std::filesystem::path(fact_out) / "results.json").string();
      ird::write_text_file(csv_path, ird::results_to_csv(rows));
      ird::write_text_file(json_path, ird::results_to_json(rows));
      for (const ird::RunMetrics& row : rows) print_row_summary(row);
      std::printf("wrote %s and %s\n", csv_path.c_str(), json_path.c_str());
      return 0;
    }

    if (*oracle) {
      const std::vector<ird::OracleCheckResult> results =
          ird::run_oracle_checks(oracle_seed);
      for (const ird::OracleCheckResult& r : results) {
        std::printf("%s\n", ird::format_check_line(r).c_str());
      }
      return ird::all_passed(results) ? 0 : 2;
    }

    if (*post) {
      ird::ExperimentConfig cfg = base_config(post_config);
      cfg.condition = ird::parse_condition(post_condition);
      cfg.mode = ird::parse_agent_mode(post_mode);
      if (post->count("--seed") > 0) cfg.master_seed = post_seed;
      const ird::PosteriorSamples samples =
          ird::posterior_for_map(cfg, post_map_index);
      ird::write_text_file(post_out, ird::posterior_to_json(samples));
      std::printf("wrote %s (%zu samples, acceptance %.3f)\n", post_out.c_str(),
                  samples.samples.size(), samples.acceptance_rate);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
