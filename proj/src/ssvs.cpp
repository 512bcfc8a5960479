#include "sursum/ssvs.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

namespace sursum {

namespace {

constexpr double kGCap = 1e6;

double draw_inverse_gamma(double shape, double rate, Rng& rng) {
  std::gamma_distribution<double> g(shape, 1.0);
  double x = g(rng);
  if (x <= 0.0) x = std::numeric_limits<double>::min();
  return rate / x;
}

}  // namespace

void validate(const SsvsConfig& config) {
  if (config.n_iter < 1) throw ConfigError("n_iter must be positive");
  if (config.burn_in < 0 || config.burn_in >= config.n_iter)
    throw ConfigError("need 0 <= burn_in < n_iter");
  if (config.thin < 1) throw ConfigError("thin must be >= 1");
  if ((config.n_iter - config.burn_in) / config.thin < 1)
    throw ConfigError("no draws retained under this n_iter/burn_in/thin");
}

RegressionCache::RegressionCache(const Matrix& X, const Matrix& Y)
    : n_(static_cast<int>(X.rows())) {
  if (X.rows() != Y.rows())
    throw InvalidParameterError("design and response row mismatch");
  gram_ = X.transpose() * X;
  cross_ = X.transpose() * Y;
  response_ss_ = Y.colwise().squaredNorm();
}

RegressionCache::SubsetFactor RegressionCache::factor(
    const IndexVector& alpha) const {
  SubsetFactor out;
  for (int i = 0; i < alpha.size(); ++i)
    if (alpha[i] != 0) out.index.push_back(i);
  const int k = static_cast<int>(out.index.size());
  if (k == 0) return out;
  Matrix sub(k, k);
  for (int a = 0; a < k; ++a)
    for (int c = 0; c < k; ++c) sub(a, c) = gram_(out.index[a], out.index[c]);
  out.llt.compute(sub);
  if (out.llt.info() != Eigen::Success)
    throw SingularDesignError("rank-deficient subset design");
  return out;
}

SsePair RegressionCache::sse_pair(const SubsetFactor& factor,
                                  int response) const {
  SsePair out;
  out.sse_null = response_ss_[response];
  if (out.sse_null <= 0.0)
    throw InvalidParameterError("response has zero variation");
  if (factor.index.empty()) {
    out.sse_alpha = out.sse_null;
    out.r_squared = 0.0;
    return out;
  }
  const int k = static_cast<int>(factor.index.size());
  Vector c(k);
  for (int a = 0; a < k; ++a) c[a] = cross_(factor.index[a], response);
  double explained = c.dot(factor.llt.solve(c));
  out.sse_alpha = std::max(out.sse_null - explained, 0.0);
  out.r_squared = std::clamp(1.0 - out.sse_alpha / out.sse_null, 0.0, 1.0);
  return out;
}

SsePair RegressionCache::sse_pair(const IndexVector& alpha,
                                  int response) const {
  return sse_pair(factor(alpha), response);
}

Vector RegressionCache::least_squares(const SubsetFactor& factor,
                                      int response) const {
  const int k = static_cast<int>(factor.index.size());
  Vector c(k);
  for (int a = 0; a < k; ++a) c[a] = cross_(factor.index[a], response);
  return factor.llt.solve(c);
}

SsePair sse_pair(const Dataset& centered, const IndexVector& alpha,
                 int response) {
  RegressionCache cache(centered.X, centered.Y);
  return cache.sse_pair(alpha, response);
}

double empirical_bayes_g(double r_squared, int k_alpha, int n) {
  if (k_alpha < 1) throw InvalidParameterError("empirical-Bayes g needs k >= 1");
  if (n - 1 - k_alpha < 1)
    throw InvalidParameterError("empirical-Bayes g needs k <= N - 2");
  if (r_squared < 0.0 || r_squared > 1.0)
    throw InvalidParameterError("r_squared outside [0, 1]");
  if (1.0 - r_squared <= 0.0) return kGCap;
  double f = (r_squared / k_alpha) / ((1.0 - r_squared) / (n - 1 - k_alpha));
  return std::max(f - 1.0, 0.0);
}

double log_bayes_factor_univariate(double sse_alpha, double sse_null, double g,
                                   int k_alpha, int n) {
  if (sse_null <= 0.0) throw InvalidParameterError("sse_null must be positive");
  if (g < 0.0) throw InvalidParameterError("g must be nonnegative");
  double ratio = sse_alpha / sse_null;
  return 0.5 * (n - k_alpha) * std::log1p(g) - 0.5 * n * std::log1p(g * ratio);
}

double log_bayes_factor_matrix(const RegressionCache& cache,
                               const IndexVector& alpha) {
  const int k = static_cast<int>((alpha != 0).count());
  if (k == 0) return 0.0;
  auto factor = cache.factor(alpha);
  double total = 0.0;
  for (int i = 0; i < cache.q(); ++i) {
    SsePair sse = cache.sse_pair(factor, i);
    double g = empirical_bayes_g(sse.r_squared, k, cache.n());
    total += log_bayes_factor_univariate(sse.sse_alpha, sse.sse_null, g, k,
                                         cache.n());
  }
  return total;
}

double log_bayes_factor_matrix(const Dataset& centered,
                               const IndexVector& alpha) {
  RegressionCache cache(centered.X, centered.Y);
  return log_bayes_factor_matrix(cache, alpha);
}

double model_prior_log(const IndexVector& alpha, ModelPrior kind) {
  if (kind == ModelPrior::kUniform) return 0.0;
  const int p = static_cast<int>(alpha.size());
  const int k = static_cast<int>((alpha != 0).count());
  double log_choose =
      std::lgamma(p + 1.0) - std::lgamma(k + 1.0) - std::lgamma(p - k + 1.0);
  return -std::log(p + 1.0) - log_choose;
}

double inclusion_probability(double log_weight_include,
                             double log_weight_exclude) {
  double d = log_weight_include - log_weight_exclude;
  if (d > 0.0) return 1.0 / (1.0 + std::exp(-d));
  double e = std::exp(d);
  return e / (1.0 + e);
}

bool gibbs_step_alpha(const RegressionCache& cache, IndexVector& alpha, int i,
                      ModelPrior prior, Rng& rng) {
  IndexVector with = alpha;
  with[i] = 1;
  IndexVector without = alpha;
  without[i] = 0;

  bool ok_with = true, ok_without = true;
  double log_with = 0.0, log_without = 0.0;
  try {
    log_with = log_bayes_factor_matrix(cache, with) + model_prior_log(with, prior);
  } catch (const SingularDesignError&) {
    ok_with = false;
  }
  try {
    log_without =
        log_bayes_factor_matrix(cache, without) + model_prior_log(without, prior);
  } catch (const SingularDesignError&) {
    ok_without = false;
  }

  if (!ok_with && !ok_without) return false;
  if (!ok_with) {
    alpha[i] = 0;
    return true;
  }
  if (!ok_without) {
    alpha[i] = 1;
    return true;
  }
  double p_include = inclusion_probability(log_with, log_without);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  alpha[i] = u(rng) < p_include ? 1 : 0;
  return true;
}

Vector empirical_bayes_g_per_response(const RegressionCache& cache,
                                      const IndexVector& alpha) {
  const int k = static_cast<int>((alpha != 0).count());
  Vector g = Vector::Zero(cache.q());
  if (k == 0) return g;
  auto factor = cache.factor(alpha);
  for (int i = 0; i < cache.q(); ++i)
    g[i] = empirical_bayes_g(cache.sse_pair(factor, i).r_squared, k, cache.n());
  return g;
}

BetaSigmaDraw sample_beta_sigma(const RegressionCache& cache,
                                const IndexVector& alpha,
                                const Vector& g_per_response, Rng& rng) {
  const int p = cache.p();
  const int q = cache.q();
  const int n = cache.n();
  const int k = static_cast<int>((alpha != 0).count());
  if (g_per_response.size() != q)
    throw InvalidParameterError("need one g per response");

  BetaSigmaDraw out;
  out.beta = Matrix::Zero(p, q);
  out.sigma = Vector::Zero(q);

  if (k == 0) {
    for (int i = 0; i < q; ++i)
      out.sigma[i] = std::sqrt(
          draw_inverse_gamma(0.5 * n, 0.5 * cache.response_ss(i), rng));
    return out;
  }

  auto factor = cache.factor(alpha);
  Matrix chol_lower = factor.llt.matrixL();
  for (int i = 0; i < q; ++i) {
    double g = g_per_response[i];
    Vector beta_ls = cache.least_squares(factor, i);
    SsePair sse = cache.sse_pair(factor, i);
    double quad = (sse.sse_null + g * sse.sse_alpha) / (1.0 + g);
    double sigma2 = draw_inverse_gamma(0.5 * n, 0.5 * quad, rng);
    out.sigma[i] = std::sqrt(sigma2);

    double shrink = g / (1.0 + g);
    Vector z = normal_vector(k, rng);
    Vector draw =
        shrink * beta_ls +
        std::sqrt(shrink) * out.sigma[i] *
            chol_lower.transpose().triangularView<Eigen::Upper>().solve(z);
    for (int a = 0; a < k; ++a) out.beta(factor.index[a], i) = draw[a];
  }
  return out;
}

void residual_factor_posterior(const Vector& b, const Vector& psi_tilde,
                               const Vector& residual_row, double* mean,
                               double* var) {
  if ((psi_tilde.array() <= 0.0).any())
    throw InvalidParameterError("psi_tilde entries must be positive");
  Vector u = b.array() / psi_tilde.array();
  double v = 1.0 / (1.0 + b.dot(u));
  *var = v;
  *mean = v * u.dot(residual_row);
}

Vector sample_residual_factor(const Matrix& residuals, Vector& b,
                              Vector& psi_tilde, Rng& rng,
                              const ResidualFactorPrior& prior) {
  const int n = static_cast<int>(residuals.rows());
  const int q = static_cast<int>(residuals.cols());
  if (b.size() != q || psi_tilde.size() != q)
    throw InvalidParameterError("residual-factor dimension mismatch");
  if ((psi_tilde.array() <= 0.0).any())
    throw InvalidParameterError("psi_tilde entries must be positive");

  Vector u = b.array() / psi_tilde.array();
  double v = 1.0 / (1.0 + b.dot(u));
  double sd = std::sqrt(v);
  std::normal_distribution<double> z;
  Vector f(n);
  for (int t = 0; t < n; ++t)
    f[t] = v * u.dot(residuals.row(t)) + sd * z(rng);

  double ftf = f.squaredNorm();
  for (int j = 0; j < q; ++j) {
    double prec = ftf / psi_tilde[j] + 1.0 / prior.loading_var;
    double mean = (f.dot(residuals.col(j)) / psi_tilde[j]) / prec;
    b[j] = mean + z(rng) / std::sqrt(prec);
  }
  for (int j = 0; j < q; ++j) {
    double rss = (residuals.col(j) - b[j] * f).squaredNorm();
    psi_tilde[j] = draw_inverse_gamma(prior.idio_shape + 0.5 * n,
                                      prior.idio_scale + 0.5 * rss, rng);
  }
  return f;
}

std::vector<PosteriorDraw> run_chain(const Dataset& data,
                                     const SsvsConfig& config,
                                     const FactorConfig& factor_config) {
  validate(data);
  validate(config);
  CenteredData centered = center(data);
  const Matrix& xc = centered.data.X;
  const Matrix& yc = centered.data.Y;
  const int p = data.p();
  const int q = data.q();
  const int n = data.n();

  RegressionCache cache(xc, yc);
  Rng rng = make_rng(config.seed);

  IndexVector alpha = IndexVector::Ones(p);
  Vector b = Vector::Zero(q);
  Vector psi_tilde =
      (yc.colwise().squaredNorm() / std::max(n - 1, 1)).transpose();
  psi_tilde = psi_tilde.cwiseMax(1e-8);
  FactorState fstate = init_factor_state(xc, factor_config);

  std::vector<PosteriorDraw> draws;
  draws.reserve((config.n_iter - config.burn_in) / config.thin);
  long skipped_steps = 0;

  for (int iter = 1; iter <= config.n_iter; ++iter) {
    try {
      if (config.point_mass)
        for (int i = 0; i < p; ++i)
          if (!gibbs_step_alpha(cache, alpha, i, config.model_prior, rng))
            ++skipped_steps;

      Vector g = empirical_bayes_g_per_response(cache, alpha);
      BetaSigmaDraw bs = sample_beta_sigma(cache, alpha, g, rng);
      Matrix residuals = yc - xc * bs.beta;
      sample_residual_factor(residuals, b, psi_tilde, rng);
      gibbs_sweep_factor(xc, fstate, factor_config, rng);

      if (iter > config.burn_in &&
          (iter - config.burn_in) % config.thin == 0) {
        PosteriorDraw draw;
        draw.iteration = iter;
        draw.params.beta = bs.beta;
        draw.params.b = b;
        draw.params.psi_tilde = psi_tilde;
        draw.params.loadings = fstate.loadings;
        draw.params.idio = fstate.idio;
        draw.params.mu_x = centered.mean_x + fstate.mu;
        draw.params.mu_y = centered.mean_y;
        draw.params.alpha = alpha;
        draws.push_back(std::move(draw));
      }
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "chain aborted at iteration " << iter << ": " << e.what();
      throw ConvergenceError(msg.str());
    }
  }
  if (skipped_steps > 0)
    std::cerr << "warning: " << skipped_steps
              << " indicator updates skipped (both candidate designs singular)\n";
  return draws;
}

}  // namespace sursum
