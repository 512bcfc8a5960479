#pragma once

#include "sursum/ssvs.hpp"

namespace sursum {

enum class PredictorMode { kRandom, kFixed };

// Expected-loss inputs.  A is q x p, S and M are SPD with lower Cholesky
// factors Q and L.
struct MomentSet {
  Matrix A;
  Matrix S;
  Matrix M;
  Matrix L;  // M = L L'
  Matrix Q;  // S = Q Q'
  PredictorMode mode = PredictorMode::kRandom;

  int p() const { return static_cast<int>(S.rows()); }
  int q() const { return static_cast<int>(M.rows()); }
};

// Lower Cholesky with escalating diagonal jitter; throws IllConditionedError
// after six escalations.
Matrix cholesky_with_jitter(const Matrix& sym, const char* label);

// Builds a MomentSet from explicit matrices (shared factorization path).
MomentSet make_moment_set(Matrix A, Matrix S, Matrix M, PredictorMode mode);

// Posterior-mean moments over draws.  Random mode accumulates the per-draw
// conditional expectations (Omega beta' Sigma_x, Sigma_x, Omega); fixed mode
// uses S = X'X exactly and A = mean(Omega beta') X'X.  X_observed must be the
// centered design and is required in fixed mode.
MomentSet compute_moments(const std::vector<PosteriorDraw>& draws,
                          PredictorMode mode,
                          const Matrix* X_observed = nullptr);

// Penalized regression form of the expected loss: design = Q' (x) L',
// target = vec(L^{-1} A Q^{-T}).  vec stacks columns of the q x p action, so
// design column i*q + j belongs to (response j, predictor i), zero-based.
struct LassoProblem {
  Matrix design;  // pq x pq
  Vector target;  // pq
  int p = 0;
  int q = 0;

  int pair_to_column(int response, int predictor) const {
    return predictor * q + response;
  }
  std::pair<int, int> column_to_pair(int column) const {
    return {column % q, column / q};
  }
};

LassoProblem build_lasso_problem(const MomentSet& moments);

// Saturated summary M^{-1} A S^{-1} via triangular solves on the stored
// Cholesky factors.
Matrix unpenalized_summary(const MomentSet& moments);

}  // namespace sursum
