#pragma once

#include "sursum/summary.hpp"

namespace sursum {

// Sequence of sparse summaries along a decreasing penalty grid.
struct SummaryPath {
  std::vector<double> lambdas;
  std::vector<Matrix> gammas;  // q x p per grid point
  Matrix gamma_star;           // lambda = 0 solution
  // (response, predictor) pairs with nonzero coefficient, per grid point
  std::vector<std::vector<std::pair<int, int>>> supports;
};

struct SolveOptions {
  int max_sweeps = 10000;
  double change_tol = 1e-9;  // scale-free: tol * (1 + |v|_inf)
  double kkt_tol = 1e-6;
};

// Smallest penalty at which the all-zero solution is optimal.
double lambda_max(const LassoProblem& problem);

// Log-spaced grid from lambda_max down to ratio * lambda_max (G points) with
// zero appended.  Throws DegenerateGridError when the target is identically
// zero.
std::vector<double> lambda_grid(const LassoProblem& problem, int grid_size,
                                double ratio);

// Minimizes |D v - t|^2 + lambda |v|_1 by cyclic coordinate descent on the
// precomputed Gram matrix.  The returned vector satisfies the KKT conditions
// at kkt_tol.
Vector solve_lasso(const LassoProblem& problem, double lambda,
                   const Vector* warm_start = nullptr,
                   const SolveOptions& options = {});

// Max KKT violation: |2 D_j'(D v - t) + lambda sign(v_j)| on the support,
// max(0, |2 D_j'(D v - t)| - lambda) off it.
double kkt_violation(const LassoProblem& problem, const Vector& v,
                     double lambda);

double lasso_objective(const LassoProblem& problem, const Vector& v,
                       double lambda);

// Warm-started sweep over a decreasing grid; gamma_star comes from the
// lambda = 0 entry (solved as a continuation step if the grid omits it).
SummaryPath solve_path(const LassoProblem& problem,
                       const std::vector<double>& grid,
                       const SolveOptions& options = {});

}  // namespace sursum
