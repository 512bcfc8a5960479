#pragma once

#include "sursum/io.hpp"

namespace sursum {

struct RunConfig {
  std::string responses_path;
  std::string predictors_path;
  std::string output_dir = ".";
  SsvsConfig ssvs;
  FactorConfig factor;
  PredictorMode mode = PredictorMode::kRandom;
  int grid_size = 50;
  double grid_ratio = 0.01;
  std::vector<double> kappa_list{0.125};
  double band_coverage = 0.75;
  int replicates = 10000;
  std::uint64_t seed = 20240901;
};

void validate(const RunConfig& config);

// Applies key = value entries onto a config.  Recognized keys: responses,
// predictors, output_dir, mode, point_mass, model_prior, n_iter, burn_in,
// thin, factors, kappa, grid_size, grid_ratio, band_coverage, replicates,
// seed.  Unknown keys raise ConfigError.
void apply_config_entries(const std::map<std::string, std::string>& entries,
                          RunConfig& config);

struct SelectionSummary {
  double kappa = 0.0;
  double lambda = 0.0;
  bool threshold_met = false;
  std::vector<std::pair<int, int>> support;
};

struct RunReport {
  int n = 0, p = 0, q = 0;
  std::uint64_t seed = 0;
  PredictorMode mode = PredictorMode::kRandom;
  bool point_mass = true;
  std::size_t retained_draws = 0;
  std::vector<SelectionSummary> selections;
  std::vector<std::pair<std::string, double>> stage_seconds;
  std::vector<std::string> notes;

  std::string to_text(const RunConfig& config,
                      const Dataset& data) const;
};

// Full pipeline: ingest, center, chain, moments, path, loss gap, selection,
// artifact emission.  Artifacts land in output_dir: draws.csv, moments.csv,
// path.csv, tradeoff.csv, graph_kappa<k>.dot per kappa, run_report.txt.
RunReport run_pipeline(const RunConfig& config);

std::string graph_file_name(double kappa);

}  // namespace sursum
