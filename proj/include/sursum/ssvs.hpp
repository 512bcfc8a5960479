#pragma once

#include "sursum/factor.hpp"
#include "sursum/model.hpp"

#include <Eigen/Cholesky>

#include <vector>

namespace sursum {

enum class ModelPrior { kUniform, kMultiplicityAdjusted };

struct SsvsConfig {
  int n_iter = 2000;
  int burn_in = 500;
  int thin = 1;
  ModelPrior model_prior = ModelPrior::kUniform;
  bool point_mass = true;  // false pins alpha to all-ones
  std::uint64_t seed = 1;
};

void validate(const SsvsConfig& config);

struct PosteriorDraw {
  long iteration = 0;
  JointParams params;
};

struct SsePair {
  double sse_alpha;
  double sse_null;
  double r_squared;
};

// Cross products of a centered design, shared by every subset regression the
// sweep touches.  Subset least squares runs on the cached Gram matrix, so the
// per-model cost does not grow with N.
class RegressionCache {
 public:
  RegressionCache(const Matrix& X, const Matrix& Y);

  int n() const { return n_; }
  int p() const { return static_cast<int>(gram_.rows()); }
  int q() const { return static_cast<int>(cross_.cols()); }
  double response_ss(int response) const { return response_ss_[response]; }

  struct SubsetFactor {
    std::vector<int> index;
    Eigen::LLT<Matrix> llt;
  };
  // Cholesky of the alpha-subset Gram; throws SingularDesignError when the
  // subset design is rank deficient.
  SubsetFactor factor(const IndexVector& alpha) const;

  SsePair sse_pair(const IndexVector& alpha, int response) const;
  SsePair sse_pair(const SubsetFactor& factor, int response) const;
  Vector least_squares(const SubsetFactor& factor, int response) const;

 private:
  Matrix gram_;          // X'X
  Matrix cross_;         // X'Y
  Vector response_ss_;   // per response squared norm
  int n_;
};

// Residual sums of squares of response on the alpha subset of a centered
// dataset, against the null (empty) model.
SsePair sse_pair(const Dataset& centered, const IndexVector& alpha,
                 int response);

// Local empirical-Bayes g: max(F - 1, 0) with
// F = (R^2 / k) / ((1 - R^2) / (N - 1 - k)).  A divide-by-zero guard caps the
// result at 1e6 when R^2 reaches 1.
double empirical_bayes_g(double r_squared, int k_alpha, int n);

// Log Bayes factor of the alpha model against the null for one response under
// the g-prior with an improper 1/sigma prior:
//   log BF = (N - k)/2 log(1 + g) - N/2 log(1 + g SSE_a / SSE_0).
double log_bayes_factor_univariate(double sse_alpha, double sse_null, double g,
                                   int k_alpha, int n);

// Sum of per-response log Bayes factors, each with its own empirical-Bayes g.
double log_bayes_factor_matrix(const RegressionCache& cache,
                               const IndexVector& alpha);
double log_bayes_factor_matrix(const Dataset& centered,
                               const IndexVector& alpha);

// Uniform: constant.  Multiplicity-adjusted: equal mass per model size,
// log 1 / ((p + 1) C(p, k)).
double model_prior_log(const IndexVector& alpha, ModelPrior kind);

// P(include) from two log-scale model weights, computed without leaving log
// space until the final ratio.
double inclusion_probability(double log_weight_include,
                             double log_weight_exclude);

// Resamples component i of alpha in place.  Returns false when both candidate
// models were rank deficient and the component was left unchanged.
bool gibbs_step_alpha(const RegressionCache& cache, IndexVector& alpha, int i,
                      ModelPrior prior, Rng& rng);

Vector empirical_bayes_g_per_response(const RegressionCache& cache,
                                      const IndexVector& alpha);

struct BetaSigmaDraw {
  Matrix beta;   // p x q, zero rows off the support
  Vector sigma;  // q
};

// Conditional draw of (beta, sigma) given alpha under the g-prior: per
// response, sigma^2 from its inverse-gamma conditional and beta from
// N(g/(1+g) beta_ls, g/(1+g) sigma^2 (X_a'X_a)^{-1}).
BetaSigmaDraw sample_beta_sigma(const RegressionCache& cache,
                                const IndexVector& alpha,
                                const Vector& g_per_response, Rng& rng);

struct ResidualFactorPrior {
  double loading_var = 1.0;
  double idio_shape = 2.0;
  double idio_scale = 1.0;
};

// Conditional N(mean, var) of the shared residual factor given one residual
// row: var = (1 + b' Psi~^{-1} b)^{-1}, mean = var * b' Psi~^{-1} e.
void residual_factor_posterior(const Vector& b, const Vector& psi_tilde,
                               const Vector& residual_row, double* mean,
                               double* var);

// Draws the shared residual factor per observation, then refreshes b and
// psi_tilde by their conjugate conditionals with the factor as an extra
// regressor.  Returns the factor draws.
Vector sample_residual_factor(const Matrix& residuals, Vector& b,
                              Vector& psi_tilde, Rng& rng,
                              const ResidualFactorPrior& prior = {});

// Full chain: alpha sweep (when point_mass), (beta, sigma), residual factor,
// predictor-marginal sweep; emits thinned post-burn-in draws.
std::vector<PosteriorDraw> run_chain(const Dataset& data,
                                     const SsvsConfig& config,
                                     const FactorConfig& factor_config = {});

}  // namespace sursum
