#include "sursum/lossgap.hpp"

#include <doctest.h>

#include "sursum/synthetic.hpp"
#include "test_helpers.hpp"

using namespace sursum;

namespace {

PosteriorDraw single_scalar_draw(double beta, double sigma_x, double psi) {
  PosteriorDraw draw;
  draw.iteration = 1;
  draw.params.beta = Matrix::Constant(1, 1, beta);
  draw.params.b = Vector::Zero(1);
  draw.params.psi_tilde = Vector::Constant(1, psi);
  draw.params.loadings = Matrix::Zero(1, 0);
  draw.params.idio = Vector::Constant(1, sigma_x);
  draw.params.mu_x = Vector::Zero(1);
  draw.params.mu_y = Vector::Zero(1);
  draw.params.alpha = IndexVector::Ones(1);
  return draw;
}

struct SmallRun {
  std::vector<PosteriorDraw> draws;
  SummaryPath path;
  Matrix x_centered;
};

SmallRun small_benchmark_run() {
  SyntheticSpec spec;
  spec.n = 120;
  spec.p = 4;
  spec.q = 2;
  spec.active = {0, 2};
  spec.x_factors = 1;
  spec.seed = 2025;
  SyntheticData truth = generate_synthetic(spec);

  SsvsConfig config;
  config.n_iter = 300;
  config.burn_in = 100;
  config.seed = 8;
  FactorConfig factor_config;
  factor_config.k = 1;

  SmallRun run;
  run.draws = run_chain(truth.data, config, factor_config);
  CenteredData centered = center(truth.data);
  run.x_centered = centered.data.X;
  MomentSet moments = compute_moments(run.draws, PredictorMode::kRandom);
  LassoProblem problem = build_lasso_problem(moments);
  run.path = solve_path(problem, lambda_grid(problem, 10, 0.01));
  return run;
}

}  // namespace

TEST_CASE("loss_at") {
  SUBCASE("zero residual, zero loss") {
    Matrix gamma(1, 2);
    gamma << 2.0, -1.0;
    Vector x(2);
    x << 1.0, 3.0;
    Vector y = gamma * x;
    CHECK(loss_at(y, x, Matrix::Identity(1, 1), gamma) == 0.0);
  }

  SUBCASE("scalar arithmetic") {
    Matrix gamma = Matrix::Zero(1, 1);
    Vector x = Vector::Ones(1);
    Vector y = Vector::Constant(1, 3.0);  // residual 3
    Matrix omega = Matrix::Constant(1, 1, 2.0);
    CHECK(loss_at(y, x, omega, gamma) == doctest::Approx(9.0));
  }

  SUBCASE("matches the Cholesky form") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
      Matrix omega = oracle::random_spd(3, rng);
      Matrix gamma = oracle::random_matrix(3, 2, rng);
      Vector x = oracle::random_matrix(2, 1, rng).col(0);
      Vector y = oracle::random_matrix(3, 1, rng).col(0);
      Eigen::LLT<Matrix> llt(omega);
      Matrix chol = llt.matrixL();
      double via_chol =
          0.5 * (chol.transpose() * (y - gamma * x)).squaredNorm();
      CHECK(loss_at(y, x, omega, gamma) ==
            doctest::Approx(via_chol).epsilon(1e-12));
    }
  }
}

TEST_CASE("delta_samples: zero-penalty entry and conventions") {
  SmallRun run = small_benchmark_run();
  DeltaOptions options;
  options.replicates = 500;
  options.seed = 99;
  LossGapResult result =
      delta_samples(run.path, run.draws, PredictorMode::kRandom, options);

  const std::size_t last = result.lambdas.size() - 1;
  CHECK(result.lambdas[last] == 0.0);
  for (double d : result.delta[last]) CHECK(d == 0.0);
  CHECK(result.pi[last] == 1.0);
  CHECK(result.delta_mean[last] == 0.0);
  CHECK(result.band_lower[last] == 0.0);
  CHECK(result.band_upper[last] == 0.0);

  for (std::size_t g = 0; g < result.lambdas.size(); ++g) {
    CHECK(result.pi[g] >= 0.0);
    CHECK(result.pi[g] <= 1.0);
    CHECK(result.band_lower[g] <= result.band_upper[g]);
    CHECK(result.support_size[g] ==
          static_cast<int>(run.path.supports[g].size()));
  }
}

TEST_CASE("delta_samples: the saturated summary wins on average") {
  SmallRun run = small_benchmark_run();
  DeltaOptions options;
  options.replicates = 4000;
  options.seed = 7;

  for (PredictorMode mode : {PredictorMode::kRandom, PredictorMode::kFixed}) {
    LossGapResult result = delta_samples(
        run.path, run.draws, mode, options,
        mode == PredictorMode::kFixed ? &run.x_centered : nullptr);
    for (std::size_t g = 0; g < result.lambdas.size(); ++g) {
      const auto& samples = result.delta[g];
      double mean = result.delta_mean[g];
      double var = 0.0;
      for (double d : samples) var += (d - mean) * (d - mean);
      var /= samples.size() - 1;
      double se = std::sqrt(var / samples.size());
      CHECK(mean >= -4.0 * se);
    }
  }
}

TEST_CASE("delta_samples: degenerate single-draw analytic mean") {
  // one draw, negligible noise: gamma* equals beta and
  // E[delta] = 0.5 * omega * sigma_x * (beta - gamma)^2
  const double beta = 2.0, sigma_x = 1.5, psi = 1e-6;
  std::vector<PosteriorDraw> draws{single_scalar_draw(beta, sigma_x, psi)};
  MomentSet moments = compute_moments(draws, PredictorMode::kRandom);
  LassoProblem problem = build_lasso_problem(moments);
  SummaryPath path =
      solve_path(problem, lambda_grid(problem, 6, 0.001));
  CHECK(path.gamma_star(0, 0) == doctest::Approx(beta).epsilon(1e-9));

  DeltaOptions options;
  options.replicates = 20000;
  options.seed = 41;
  LossGapResult result =
      delta_samples(path, draws, PredictorMode::kRandom, options);

  const double omega = 1.0 / psi;
  for (std::size_t g = 0; g + 1 < result.lambdas.size(); ++g) {
    double gap = beta - path.gammas[g](0, 0);
    double expected = 0.5 * omega * sigma_x * gap * gap;
    const auto& samples = result.delta[g];
    double mean = result.delta_mean[g];
    double var = 0.0;
    for (double d : samples) var += (d - mean) * (d - mean);
    var /= samples.size() - 1;
    double se = std::sqrt(var / samples.size());
    CHECK(std::abs(mean - expected) < 4.0 * se + 1e-9 * expected);
  }
}

TEST_CASE("delta_samples: common random numbers and determinism") {
  SmallRun run = small_benchmark_run();
  DeltaOptions options;
  options.replicates = 300;
  options.seed = 17;

  SUBCASE("same seed reproduces every sample bitwise") {
    LossGapResult a =
        delta_samples(run.path, run.draws, PredictorMode::kRandom, options);
    LossGapResult b =
        delta_samples(run.path, run.draws, PredictorMode::kRandom, options);
    for (std::size_t g = 0; g < a.delta.size(); ++g)
      for (int r = 0; r < options.replicates; ++r)
        CHECK(a.delta[g][r] == b.delta[g][r]);
  }

  SUBCASE("replicate tuples are shared across grid subsets") {
    // dropping interior grid entries must not change the samples of the
    // remaining entries: nothing about the grid feeds the random draws
    SummaryPath subset;
    subset.lambdas = {run.path.lambdas.front(), run.path.lambdas.back()};
    subset.gammas = {run.path.gammas.front(), run.path.gammas.back()};
    subset.supports = {run.path.supports.front(), run.path.supports.back()};
    subset.gamma_star = run.path.gamma_star;

    LossGapResult full =
        delta_samples(run.path, run.draws, PredictorMode::kRandom, options);
    LossGapResult sliced =
        delta_samples(subset, run.draws, PredictorMode::kRandom, options);
    for (int r = 0; r < options.replicates; ++r) {
      CHECK(sliced.delta[0][r] == full.delta[0][r]);
      CHECK(sliced.delta[1][r] == full.delta.back()[r]);
    }
  }

  SUBCASE("fixed mode ignores hypothetical future predictor values") {
    LossGapResult a = delta_samples(run.path, run.draws, PredictorMode::kFixed,
                                    options, &run.x_centered);
    LossGapResult b = delta_samples(run.path, run.draws, PredictorMode::kFixed,
                                    options, &run.x_centered);
    for (std::size_t g = 0; g < a.delta.size(); ++g)
      for (int r = 0; r < options.replicates; ++r)
        CHECK(a.delta[g][r] == b.delta[g][r]);
  }
}

TEST_CASE("fixed-mode gap equals the direct trace loss") {
  SmallRun run = small_benchmark_run();
  DeltaOptions options;
  options.replicates = 40;
  options.seed = 23;
  LossGapResult result = delta_samples(run.path, run.draws,
                                       PredictorMode::kFixed, options,
                                       &run.x_centered);

  const Matrix& x = run.x_centered;
  const int n = static_cast<int>(x.rows());
  const int q = static_cast<int>(run.path.gamma_star.rows());
  const int n_draws = static_cast<int>(run.draws.size());

  // replay the replicate substreams and evaluate the residual form directly
  for (int r = 0; r < options.replicates; ++r) {
    Rng rng = make_rng(options.seed, static_cast<std::uint64_t>(r));
    std::uniform_int_distribution<int> pick(0, n_draws - 1);
    const JointParams& params = run.draws[pick(rng)].params;
    Matrix omega = precision_of_psi(params.b, params.psi_tilde);
    Matrix future = x * params.beta;
    std::normal_distribution<double> z;
    Vector psi_sd = params.psi_tilde.cwiseSqrt();
    for (int t = 0; t < n; ++t) {
      double shared = z(rng);
      for (int j = 0; j < q; ++j)
        future(t, j) += params.b[j] * shared + psi_sd[j] * z(rng);
    }
    auto direct_loss = [&](const Matrix& gamma) {
      Matrix resid = future - x * gamma.transpose();
      return 0.5 * (resid * omega).cwiseProduct(resid).sum();
    };
    double base = direct_loss(run.path.gamma_star);
    for (std::size_t g = 0; g < run.path.lambdas.size(); ++g) {
      double expected = (direct_loss(run.path.gammas[g]) - base) / n;
      CHECK(result.delta[g][r] ==
            doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("select_model") {
  SummaryPath path;
  path.lambdas = {4.0, 3.0, 2.0, 1.0};
  for (int g = 0; g < 4; ++g) {
    path.gammas.push_back(Matrix::Constant(1, 1, static_cast<double>(g)));
    path.supports.push_back(
        g == 0 ? std::vector<std::pair<int, int>>{}
               : std::vector<std::pair<int, int>>{{0, 0}});
  }
  path.gamma_star = path.gammas.back();

  LossGapResult result;
  result.lambdas = path.lambdas;
  result.pi = {0.01, 0.05, 0.20, 0.40};
  result.delta.assign(4, {0.0});
  result.delta_mean.assign(4, 0.0);
  result.band_lower.assign(4, 0.0);
  result.band_upper.assign(4, 0.0);
  result.support_size = {0, 1, 1, 1};

  SUBCASE("sparsest model clearing the threshold") {
    SelectedModel selected = select_model(result, path, 0.125);
    CHECK(selected.index == 2);
    CHECK(selected.lambda == 2.0);
    CHECK(selected.threshold_met);
  }

  SUBCASE("kappa = 0 picks the sparsest entry with positive pi") {
    SelectedModel selected = select_model(result, path, 0.0);
    CHECK(selected.index == 0);
    CHECK(selected.threshold_met);
  }

  SUBCASE("no qualifying entry falls back to the densest model") {
    SelectedModel selected = select_model(result, path, 0.45);
    CHECK(selected.index == 3);
    CHECK_FALSE(selected.threshold_met);
  }

  SUBCASE("mismatched grids are rejected") {
    SummaryPath short_path = path;
    short_path.lambdas.pop_back();
    short_path.gammas.pop_back();
    short_path.supports.pop_back();
    CHECK_THROWS_AS(select_model(result, short_path, 0.1),
                    InvalidParameterError);
  }
}

TEST_CASE("delta_samples input validation") {
  SmallRun run = small_benchmark_run();
  DeltaOptions options;
  options.replicates = 10;
  CHECK_THROWS_AS(
      delta_samples(run.path, {}, PredictorMode::kRandom, options),
      InvalidParameterError);
  CHECK_THROWS_AS(delta_samples(run.path, run.draws, PredictorMode::kFixed,
                                options, nullptr),
                  InvalidParameterError);
}
