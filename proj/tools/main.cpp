#include "sursum/pipeline.hpp"
#include "sursum/synthetic.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

void write_matrix_csv(const std::string& path,
                      const std::vector<std::string>& names,
                      const sursum::Matrix& values) {
  std::ofstream out(path);
  if (!out) throw sursum::IngestError("cannot open for writing: " + path);
  for (std::size_t c = 0; c < names.size(); ++c)
    out << (c ? "," : "") << names[c];
  out << "\n";
  for (int r = 0; r < values.rows(); ++r) {
    for (int c = 0; c < values.cols(); ++c)
      out << (c ? "," : "") << sursum::format_number(values(r, c));
    out << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse posterior summaries for seemingly unrelated regressions"};
  app.require_subcommand(1);

  // ---- run ----
  auto* run = app.add_subcommand("run", "Fit, summarize, and emit artifacts");
  std::string config_path, responses, predictors, output_dir, mode, prior;
  std::string kappa_csv, point_mass;
  long seed = -1, n_iter = -1, burn_in = -1, thin = -1, factors = -1;
  long grid_size = -1, replicates = -1;
  double grid_ratio = -1.0, band_coverage = -1.0;

  run->add_option("--config", config_path, "key = value config file");
  run->add_option("--responses", responses, "response CSV (header row)");
  run->add_option("--predictors", predictors, "predictor CSV (header row)");
  run->add_option("--output-dir", output_dir, "artifact directory");
  run->add_option("--mode", mode, "random | fixed");
  run->add_option("--point-mass", point_mass,
                  "true | false (false pins the model indicator)");
  run->add_option("--model-prior", prior, "uniform | multiplicity_adjusted");
  run->add_option("--seed", seed, "chain and replicate seed");
  run->add_option("--n-iter", n_iter, "Gibbs iterations");
  run->add_option("--burn-in", burn_in, "discarded iterations");
  run->add_option("--thin", thin, "thinning stride");
  run->add_option("--factors", factors, "latent predictor factors");
  run->add_option("--kappa", kappa_csv, "comma list of thresholds in (0, 0.5]");
  run->add_option("--grid-size", grid_size, "penalty grid points before zero");
  run->add_option("--grid-ratio", grid_ratio, "smallest positive grid fraction");
  run->add_option("--replicates", replicates, "loss-gap Monte Carlo replicates");
  run->add_option("--band-coverage", band_coverage, "credible band mass");

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "Write a synthetic benchmark dataset");
  std::string out_responses = "responses.csv", out_predictors = "predictors.csv";
  std::string out_truth = "truth.csv";
  sursum::SyntheticSpec spec;
  long synth_seed = 1, n_active = 3;
  synth->add_option("--out-responses", out_responses, "response CSV path");
  synth->add_option("--out-predictors", out_predictors, "predictor CSV path");
  synth->add_option("--out-truth", out_truth, "generating-coefficient CSV path");
  synth->add_option("--n", spec.n, "observations");
  synth->add_option("--p", spec.p, "predictors");
  synth->add_option("--q", spec.q, "responses");
  synth->add_option("--n-active", n_active, "predictors with signal");
  synth->add_option("--signal-low", spec.signal_low, "min |coefficient|");
  synth->add_option("--signal-high", spec.signal_high, "max |coefficient|");
  synth->add_option("--seed", synth_seed, "generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      sursum::RunConfig config;
      if (!config_path.empty())
        sursum::apply_config_entries(sursum::parse_key_value_file(config_path),
                                     config);
      std::map<std::string, std::string> overrides;
      if (!responses.empty()) overrides["responses"] = responses;
      if (!predictors.empty()) overrides["predictors"] = predictors;
      if (!output_dir.empty()) overrides["output_dir"] = output_dir;
      if (!mode.empty()) overrides["mode"] = mode;
      if (!point_mass.empty()) overrides["point_mass"] = point_mass;
      if (!prior.empty()) overrides["model_prior"] = prior;
      if (seed >= 0) overrides["seed"] = std::to_string(seed);
      if (n_iter >= 0) overrides["n_iter"] = std::to_string(n_iter);
      if (burn_in >= 0) overrides["burn_in"] = std::to_string(burn_in);
      if (thin >= 0) overrides["thin"] = std::to_string(thin);
      if (factors >= 0) overrides["factors"] = std::to_string(factors);
      if (!kappa_csv.empty()) overrides["kappa"] = kappa_csv;
      if (grid_size >= 0) overrides["grid_size"] = std::to_string(grid_size);
      if (grid_ratio > 0.0)
        overrides["grid_ratio"] = sursum::format_number(grid_ratio);
      if (replicates >= 0) overrides["replicates"] = std::to_string(replicates);
      if (band_coverage > 0.0)
        overrides["band_coverage"] = sursum::format_number(band_coverage);
      sursum::apply_config_entries(overrides, config);

      sursum::RunReport report = sursum::run_pipeline(config);
      std::cout << "done: " << report.retained_draws << " draws, "
                << report.selections.size() << " selection(s) in "
                << config.output_dir << "\n";
      for (const auto& sel : report.selections)
        std::cout << "  kappa " << sursum::format_number(sel.kappa)
                  << " -> support size " << sel.support.size()
                  << (sel.threshold_met ? "" : " (threshold not met)") << "\n";
      return 0;
    }

    spec.seed = static_cast<std::uint64_t>(synth_seed);
    spec.active.clear();
    for (long i = 0; i < n_active && i < spec.p; ++i)
      spec.active.push_back(static_cast<int>(i));
    sursum::SyntheticData truth = sursum::generate_synthetic(spec);
    write_matrix_csv(out_responses, truth.data.response_names, truth.data.Y);
    write_matrix_csv(out_predictors, truth.data.predictor_names, truth.data.X);
    {
      std::ofstream out(out_truth);
      if (!out) throw sursum::IngestError("cannot open for writing: " + out_truth);
      out << "predictor,response,beta\n";
      for (int i = 0; i < truth.beta.rows(); ++i)
        for (int j = 0; j < truth.beta.cols(); ++j)
          if (truth.beta(i, j) != 0.0)
            out << truth.data.predictor_names[i] << ","
                << truth.data.response_names[j] << ","
                << sursum::format_number(truth.beta(i, j)) << "\n";
    }
    std::cout << "wrote " << out_responses << ", " << out_predictors << ", "
              << out_truth << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
