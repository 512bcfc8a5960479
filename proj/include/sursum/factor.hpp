#pragma once

#include "sursum/common.hpp"

namespace sursum {

struct FactorConfig {
  int k = 3;                        // latent factor count, 0 <= k <= p
  double prior_scale_loadings = 1.0;  // loading prior variance
  double prior_shape_idio = 2.0;      // inverse-gamma shape
  double prior_scale_idio = 1.0;      // inverse-gamma scale
  double prior_var_mu = 100.0;        // mean prior variance (Phi scale)
};

// Sampler state for the predictor marginal X_t = mu + loadings f_t + v_t.
struct FactorState {
  Matrix loadings;  // p x k
  Vector idio;      // p, > 0
  Vector mu;        // p
  Matrix scores;    // N x k
};

FactorState init_factor_state(const Matrix& X, const FactorConfig& config);

// One full conjugate sweep: scores | rest, loading rows | rest,
// idiosyncratic variances | rest, mean | rest.
void gibbs_sweep_factor(const Matrix& X, FactorState& state,
                        const FactorConfig& config, Rng& rng);

// loadings loadings' + diag(idio)
Matrix sigma_x_of(const FactorState& state);

}  // namespace sursum
