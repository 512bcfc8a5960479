#include "sursum/lossgap.hpp"

#include <algorithm>
#include <cmath>

namespace sursum {

namespace {

void finalize_stats(LossGapResult& result) {
  const std::size_t n_lambda = result.lambdas.size();
  result.delta_mean.resize(n_lambda);
  result.band_lower.resize(n_lambda);
  result.band_upper.resize(n_lambda);
  result.pi.resize(n_lambda);
  const double tail = 0.5 * (1.0 - result.band_coverage);
  for (std::size_t g = 0; g < n_lambda; ++g) {
    const auto& samples = result.delta[g];
    KahanSum sum;
    int negative = 0;
    bool all_zero = true;
    for (double d : samples) {
      sum.add(d);
      if (d < 0.0) ++negative;
      if (d != 0.0) all_zero = false;
    }
    result.delta_mean[g] = sum.value() / static_cast<double>(samples.size());
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    result.band_lower[g] = quantile_sorted(sorted, tail);
    result.band_upper[g] = quantile_sorted(sorted, 1.0 - tail);
    // the gap against itself is degenerate at zero; "no worse" by convention
    result.pi[g] = all_zero
                       ? 1.0
                       : static_cast<double>(negative) /
                             static_cast<double>(samples.size());
  }
}

}  // namespace

double loss_at(const Vector& y, const Vector& x, const Matrix& omega,
               const Matrix& gamma) {
  Vector residual = y - gamma * x;
  return 0.5 * residual.dot(omega * residual);
}

LossGapResult delta_samples(const SummaryPath& path,
                            const std::vector<PosteriorDraw>& draws,
                            PredictorMode mode, const DeltaOptions& options,
                            const Matrix* X_observed) {
  if (draws.empty()) throw InvalidParameterError("no posterior draws");
  if (path.gammas.empty()) throw InvalidParameterError("empty summary path");
  if (options.replicates < 1)
    throw InvalidParameterError("need at least one replicate");
  if (options.band_coverage <= 0.0 || options.band_coverage >= 1.0)
    throw InvalidParameterError("band coverage must lie in (0, 1)");
  if (mode == PredictorMode::kFixed && X_observed == nullptr)
    throw InvalidParameterError("fixed mode requires the observed design");

  const std::size_t n_lambda = path.lambdas.size();
  const int n_draws = static_cast<int>(draws.size());

  LossGapResult result;
  result.lambdas = path.lambdas;
  result.mode = mode;
  result.band_coverage = options.band_coverage;
  result.delta.assign(n_lambda, std::vector<double>(options.replicates));
  result.support_size.resize(n_lambda);
  for (std::size_t g = 0; g < n_lambda; ++g)
    result.support_size[g] = static_cast<int>(path.supports[g].size());

  if (mode == PredictorMode::kRandom) {
    for (int r = 0; r < options.replicates; ++r) {
      Rng rng = make_rng(options.seed, static_cast<std::uint64_t>(r));
      std::uniform_int_distribution<int> pick(0, n_draws - 1);
      const JointParams& params = draws[pick(rng)].params;
      PredictiveDraw pred = sample_predictive(params, rng);
      // the summaries act on centered variables
      Vector x = pred.x - params.mu_x;
      Vector y = pred.y - params.mu_y;
      Matrix omega = precision_of_psi(params.b, params.psi_tilde);
      double base = loss_at(y, x, omega, path.gamma_star);
      for (std::size_t g = 0; g < n_lambda; ++g)
        result.delta[g][r] = loss_at(y, x, omega, path.gammas[g]) - base;
    }
    finalize_stats(result);
    return result;
  }

  // Fixed predictors: future responses are simulated at the observed design;
  // the X'Y cross term is the only replicate-dependent part of the gap, so
  // the quadratic pieces are precomputed per grid entry.
  const Matrix& x_obs = *X_observed;
  const int n = static_cast<int>(x_obs.rows());
  const int q = static_cast<int>(path.gamma_star.rows());
  Matrix sxx = x_obs.transpose() * x_obs;
  std::vector<Matrix> quad(n_lambda);   // gamma S gamma'
  std::vector<Matrix> scaled(n_lambda); // gamma S
  for (std::size_t g = 0; g < n_lambda; ++g) {
    scaled[g] = path.gammas[g] * sxx;
    quad[g] = scaled[g] * path.gammas[g].transpose();
  }
  Matrix star_scaled = path.gamma_star * sxx;
  Matrix star_quad = star_scaled * path.gamma_star.transpose();

  for (int r = 0; r < options.replicates; ++r) {
    Rng rng = make_rng(options.seed, static_cast<std::uint64_t>(r));
    std::uniform_int_distribution<int> pick(0, n_draws - 1);
    const JointParams& params = draws[pick(rng)].params;
    Matrix omega = precision_of_psi(params.b, params.psi_tilde);

    // future responses: X beta + rows of b z0 + sqrt(psi~) z
    Matrix future = x_obs * params.beta;
    std::normal_distribution<double> z;
    Vector psi_sd = params.psi_tilde.cwiseSqrt();
    for (int t = 0; t < n; ++t) {
      double shared = z(rng);
      for (int j = 0; j < q; ++j)
        future(t, j) += params.b[j] * shared + psi_sd[j] * z(rng);
    }
    Matrix omega_cross = omega * (future.transpose() * x_obs);  // q x p

    double base = 0.5 * (omega.cwiseProduct(star_quad).sum() -
                         2.0 * path.gamma_star.cwiseProduct(omega_cross).sum());
    for (std::size_t g = 0; g < n_lambda; ++g) {
      double value = 0.5 * (omega.cwiseProduct(quad[g]).sum() -
                            2.0 * path.gammas[g].cwiseProduct(omega_cross).sum());
      result.delta[g][r] = (value - base) / static_cast<double>(n);
    }
  }
  finalize_stats(result);
  return result;
}

SelectedModel select_model(const LossGapResult& result, const SummaryPath& path,
                           double kappa) {
  if (result.lambdas.size() != path.lambdas.size())
    throw InvalidParameterError("result and path grids differ in length");
  if (kappa < 0.0 || kappa >= 1.0)
    throw InvalidParameterError("kappa must lie in [0, 1)");

  SelectedModel out;
  for (std::size_t g = 0; g < result.lambdas.size(); ++g) {
    if (result.pi[g] > kappa) {
      out.index = static_cast<int>(g);
      out.threshold_met = true;
      break;
    }
  }
  if (!out.threshold_met) out.index = static_cast<int>(result.lambdas.size()) - 1;
  out.lambda = path.lambdas[out.index];
  out.gamma = path.gammas[out.index];
  out.support = path.supports[out.index];
  return out;
}

}  // namespace sursum
