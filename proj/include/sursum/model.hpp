#pragma once

#include "sursum/common.hpp"

#include <string>
#include <vector>

namespace sursum {

// Observed data: N rows of q responses and p predictors.
struct Dataset {
  Matrix Y;  // N x q
  Matrix X;  // N x p
  std::vector<std::string> response_names;
  std::vector<std::string> predictor_names;

  int n() const { return static_cast<int>(Y.rows()); }
  int q() const { return static_cast<int>(Y.cols()); }
  int p() const { return static_cast<int>(X.cols()); }
};

// Requires matching row counts, finite entries, names matching the column
// counts, and N > p + 1.
void validate(const Dataset& data);

struct CenteredData {
  Dataset data;   // column-centered copy
  Vector mean_y;  // q
  Vector mean_x;  // p
};

CenteredData center(const Dataset& data);

// One full parameterization of the joint model.  The residual covariance is
// kept in factored form psi = b b' + diag(psi_tilde), and the predictor
// covariance as sigma_x = loadings loadings' + diag(idio); dense matrices are
// materialized on demand.
struct JointParams {
  Matrix beta;       // p x q, row i zero whenever alpha[i] == 0
  Vector b;          // q
  Vector psi_tilde;  // q, entries > 0
  Matrix loadings;   // p x k
  Vector idio;       // p, entries > 0
  Vector mu_x;       // p
  Vector mu_y;       // q
  IndexVector alpha; // p, entries in {0, 1}

  Matrix psi() const;
  Matrix sigma_x() const;
};

void validate(const JointParams& params);

// Inverse of b b' + diag(psi_tilde) by the rank-one update formula.
Matrix precision_of_psi(const Vector& b, const Vector& psi_tilde);

// Joint covariance of (Y, X): [[beta' Sx beta + psi, beta' Sx], [Sx beta, Sx]].
Matrix block_covariance(const JointParams& params);

struct PredictiveDraw {
  Vector x;  // p
  Vector y;  // q
};

// x ~ N(mu_x, sigma_x); y = mu_y + beta'(x - mu_x) + e, e ~ N(0, psi).
// Consumes normals in a fixed order (scores, idio noise, shared residual
// factor, idio residual) so sequences are reproducible.
PredictiveDraw sample_predictive(const JointParams& params, Rng& rng);

}  // namespace sursum
