#pragma once

#include "sursum/path.hpp"

namespace sursum {

// Per-penalty Monte Carlo distribution of the loss gap against the saturated
// summary, with the probability pi of the sparse summary being no worse.
struct LossGapResult {
  std::vector<double> lambdas;
  std::vector<std::vector<double>> delta;  // per lambda, replicate values
  std::vector<double> delta_mean;
  std::vector<double> band_lower;
  std::vector<double> band_upper;
  std::vector<double> pi;
  std::vector<int> support_size;
  PredictorMode mode = PredictorMode::kRandom;
  double band_coverage = 0.75;
};

// Quadratic predictive loss 0.5 (y - gamma x)' omega (y - gamma x).
double loss_at(const Vector& y, const Vector& x, const Matrix& omega,
               const Matrix& gamma);

struct DeltaOptions {
  int replicates = 10000;
  double band_coverage = 0.75;  // central credible band mass
  std::uint64_t seed = 1;
};

// Samples the loss gap for every grid entry under common random numbers: one
// (parameter draw, predictive draw) tuple per replicate is reused across the
// whole grid.  Fixed mode simulates a full future response matrix at the
// observed (centered) design and reports the gap per observation.
LossGapResult delta_samples(const SummaryPath& path,
                            const std::vector<PosteriorDraw>& draws,
                            PredictorMode mode, const DeltaOptions& options,
                            const Matrix* X_observed = nullptr);

struct SelectedModel {
  int index = -1;
  double lambda = 0.0;
  Matrix gamma;
  std::vector<std::pair<int, int>> support;
  bool threshold_met = false;  // false: fell back to the densest model
};

// Sparsest model (largest lambda) with pi > kappa; falls back to the densest
// grid entry when none qualifies.
SelectedModel select_model(const LossGapResult& result, const SummaryPath& path,
                           double kappa);

}  // namespace sursum
