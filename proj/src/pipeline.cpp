#include "sursum/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sursum {

namespace {

constexpr const char* kVersion = "0.1.0";

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty())
    throw ConfigError("key '" + key + "': cannot parse '" + value + "'");
  return v;
}

long parse_long(const std::string& key, const std::string& value) {
  double v = parse_double(key, value);
  auto rounded = static_cast<long>(v);
  if (static_cast<double>(rounded) != v)
    throw ConfigError("key '" + key + "': expected an integer, got '" + value +
                      "'");
  return rounded;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + value +
                    "'");
}

std::vector<double> parse_list(const std::string& key,
                               const std::string& value) {
  std::vector<double> out;
  std::stringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ','))
    out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

class StageTimer {
 public:
  explicit StageTimer(RunReport& report) : report_(report) {}
  template <typename F>
  auto run(const std::string& name, F&& body) {
    auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(body())>) {
      try {
        body();
      } catch (const std::exception& e) {
        throw std::runtime_error("stage '" + name + "' failed: " + e.what());
      }
      record(name, start);
    } else {
      try {
        auto value = body();
        record(name, start);
        return value;
      } catch (const std::exception& e) {
        throw std::runtime_error("stage '" + name + "' failed: " + e.what());
      }
    }
  }

 private:
  void record(const std::string& name,
              std::chrono::steady_clock::time_point start) {
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    report_.stage_seconds.emplace_back(name, seconds);
  }
  RunReport& report_;
};

}  // namespace

void validate(const RunConfig& config) {
  validate(config.ssvs);
  if (config.responses_path.empty() || config.predictors_path.empty())
    throw ConfigError("response and predictor paths are required");
  if (config.grid_size < 2) throw ConfigError("grid_size must be >= 2");
  if (config.grid_ratio <= 0.0 || config.grid_ratio >= 1.0)
    throw ConfigError("grid_ratio must lie in (0, 1)");
  if (config.kappa_list.empty()) throw ConfigError("kappa list is empty");
  for (double kappa : config.kappa_list)
    if (kappa <= 0.0 || kappa > 0.5)
      throw ConfigError("kappa entries must lie in (0, 0.5]");
  if (config.band_coverage <= 0.0 || config.band_coverage >= 1.0)
    throw ConfigError("band_coverage must lie in (0, 1)");
  if (config.replicates < 1) throw ConfigError("replicates must be positive");
}

void apply_config_entries(const std::map<std::string, std::string>& entries,
                          RunConfig& config) {
  for (const auto& [key, value] : entries) {
    if (key == "responses") {
      config.responses_path = value;
    } else if (key == "predictors") {
      config.predictors_path = value;
    } else if (key == "output_dir") {
      config.output_dir = value;
    } else if (key == "mode") {
      if (value == "random")
        config.mode = PredictorMode::kRandom;
      else if (value == "fixed")
        config.mode = PredictorMode::kFixed;
      else
        throw ConfigError("mode must be 'random' or 'fixed', got '" + value +
                          "'");
    } else if (key == "point_mass") {
      config.ssvs.point_mass = parse_bool(key, value);
    } else if (key == "model_prior") {
      if (value == "uniform")
        config.ssvs.model_prior = ModelPrior::kUniform;
      else if (value == "multiplicity_adjusted")
        config.ssvs.model_prior = ModelPrior::kMultiplicityAdjusted;
      else
        throw ConfigError(
            "model_prior must be 'uniform' or 'multiplicity_adjusted'");
    } else if (key == "n_iter") {
      config.ssvs.n_iter = static_cast<int>(parse_long(key, value));
    } else if (key == "burn_in") {
      config.ssvs.burn_in = static_cast<int>(parse_long(key, value));
    } else if (key == "thin") {
      config.ssvs.thin = static_cast<int>(parse_long(key, value));
    } else if (key == "factors") {
      config.factor.k = static_cast<int>(parse_long(key, value));
    } else if (key == "kappa") {
      config.kappa_list = parse_list(key, value);
    } else if (key == "grid_size") {
      config.grid_size = static_cast<int>(parse_long(key, value));
    } else if (key == "grid_ratio") {
      config.grid_ratio = parse_double(key, value);
    } else if (key == "band_coverage") {
      config.band_coverage = parse_double(key, value);
    } else if (key == "replicates") {
      config.replicates = static_cast<int>(parse_long(key, value));
    } else if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(parse_long(key, value));
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

std::string graph_file_name(double kappa) {
  std::ostringstream name;
  name << "graph_kappa" << format_number(kappa) << ".dot";
  return name.str();
}

std::string RunReport::to_text(const RunConfig& config,
                               const Dataset& data) const {
  std::ostringstream out;
  out << "sursum run report (version " << kVersion << ")\n";
  out << "seed: " << seed << "\n";
  out << "data: N = " << n << ", responses q = " << q << ", predictors p = "
      << p << "\n";
  out << "responses file: " << config.responses_path << "\n";
  out << "predictors file: " << config.predictors_path << "\n";
  out << "mode: "
      << (mode == PredictorMode::kRandom ? "random" : "fixed") << "\n";
  out << "point_mass: " << (point_mass ? "true" : "false") << "\n";
  out << "model_prior: "
      << (config.ssvs.model_prior == ModelPrior::kUniform
              ? "uniform"
              : "multiplicity_adjusted")
      << "\n";
  out << "chain: n_iter = " << config.ssvs.n_iter
      << ", burn_in = " << config.ssvs.burn_in
      << ", thin = " << config.ssvs.thin
      << ", retained = " << retained_draws << "\n";
  out << "factors: k = " << config.factor.k << "\n";
  out << "grid: size = " << config.grid_size
      << ", ratio = " << format_number(config.grid_ratio) << "\n";
  out << "replicates: " << config.replicates << "\n";
  out << "band coverage: " << format_number(config.band_coverage) << "\n";
  out << "\nselections:\n";
  for (const auto& sel : selections) {
    out << "  kappa = " << format_number(sel.kappa) << ": lambda = "
        << format_number(sel.lambda) << ", support size = "
        << sel.support.size()
        << (sel.threshold_met ? "" : " (threshold not met, densest model)")
        << "\n";
    out << "    links:";
    for (const auto& [response, predictor] : sel.support)
      out << " " << data.response_names[response] << "~"
          << data.predictor_names[predictor];
    out << "\n";
  }
  out << "\ntimings (s):\n";
  for (const auto& [name, seconds] : stage_seconds) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", seconds);
    out << "  " << name << ": " << buf << "\n";
  }
  for (const auto& note : notes) out << "note: " << note << "\n";
  return out.str();
}

RunReport run_pipeline(const RunConfig& config) {
  validate(config);
  RunReport report;
  report.seed = config.seed;
  report.mode = config.mode;
  report.point_mass = config.ssvs.point_mass;
  StageTimer timer(report);

  Dataset data = timer.run("ingest", [&] {
    return ingest(config.responses_path, config.predictors_path);
  });
  report.n = data.n();
  report.p = data.p();
  report.q = data.q();

  CenteredData centered = center(data);

  SsvsConfig chain_config = config.ssvs;
  chain_config.seed = config.seed;
  std::vector<PosteriorDraw> draws = timer.run("chain", [&] {
    return run_chain(data, chain_config, config.factor);
  });
  report.retained_draws = draws.size();

  MomentSet moments = timer.run("moments", [&] {
    return compute_moments(draws, config.mode,
                           config.mode == PredictorMode::kFixed
                               ? &centered.data.X
                               : nullptr);
  });

  LassoProblem problem = build_lasso_problem(moments);
  SummaryPath path = timer.run("path", [&] {
    return solve_path(problem,
                      lambda_grid(problem, config.grid_size, config.grid_ratio));
  });

  DeltaOptions delta_options;
  delta_options.replicates = config.replicates;
  delta_options.band_coverage = config.band_coverage;
  delta_options.seed = splitmix64(config.seed ^ 0x6c8e9cf570932bd5ULL);
  LossGapResult gaps = timer.run("loss_gap", [&] {
    return delta_samples(path, draws, config.mode, delta_options,
                         config.mode == PredictorMode::kFixed
                             ? &centered.data.X
                             : nullptr);
  });

  namespace fs = std::filesystem;
  auto in_dir = [&](const std::string& name) {
    return (fs::path(config.output_dir) / name).string();
  };
  timer.run("emit", [&] {
    fs::create_directories(config.output_dir);
    write_draws_csv(in_dir("draws.csv"), draws);
    write_moments_csv(in_dir("moments.csv"), moments);
    write_path_csv(in_dir("path.csv"), path);
    write_tradeoff_csv(in_dir("tradeoff.csv"), gaps);
    for (double kappa : config.kappa_list) {
      SelectedModel selected = select_model(gaps, path, kappa);
      SelectionSummary summary;
      summary.kappa = kappa;
      summary.lambda = selected.lambda;
      summary.threshold_met = selected.threshold_met;
      summary.support = selected.support;
      report.selections.push_back(summary);
      emit_graph(selected.support, data.response_names, data.predictor_names,
                 in_dir(graph_file_name(kappa)));
      if (!selected.threshold_met) {
        std::ostringstream note;
        note << "kappa " << format_number(kappa)
             << ": no grid entry cleared the threshold; densest model reported";
        report.notes.push_back(note.str());
      }
    }
  });

  std::ofstream report_file(in_dir("run_report.txt"));
  if (!report_file)
    throw IngestError("cannot write run report in " + config.output_dir);
  report_file << report.to_text(config, data);
  return report;
}

}  // namespace sursum
