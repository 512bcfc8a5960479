#include "sursum/path.hpp"

#include <cmath>
#include <sstream>

namespace sursum {

namespace {

double soft_threshold(double x, double threshold) {
  if (x > threshold) return x - threshold;
  if (x < -threshold) return x + threshold;
  return 0.0;
}

// Gram form of one problem, shared across a path solve.
struct Workspace {
  Matrix gram;      // D'D
  Vector linear;    // D't
  double target_ss;

  explicit Workspace(const LassoProblem& problem)
      : gram(problem.design.transpose() * problem.design),
        linear(problem.design.transpose() * problem.target),
        target_ss(problem.target.squaredNorm()) {}

  double objective(const Vector& v, double lambda) const {
    return v.dot(gram * v) - 2.0 * linear.dot(v) + target_ss +
           lambda * v.lpNorm<1>();
  }

  double kkt(const Vector& v, const Vector& gram_v, double lambda) const {
    double worst = 0.0;
    for (int j = 0; j < v.size(); ++j) {
      double grad = 2.0 * (gram_v[j] - linear[j]);
      double viol = v[j] != 0.0 ? std::abs(grad + lambda * (v[j] > 0 ? 1.0 : -1.0))
                                : std::max(0.0, std::abs(grad) - lambda);
      worst = std::max(worst, viol);
    }
    return worst;
  }

  Vector solve(double lambda, Vector v, const SolveOptions& options) const {
    const int dim = static_cast<int>(v.size());
    Vector gram_v = gram * v;
    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
      double max_change = 0.0;
      for (int j = 0; j < dim; ++j) {
        double diag = gram(j, j);
        if (diag <= 0.0) {
          v[j] = 0.0;
          continue;
        }
        double rho = linear[j] - gram_v[j] + diag * v[j];
        double updated = soft_threshold(rho, 0.5 * lambda) / diag;
        double delta = updated - v[j];
        if (delta != 0.0) {
          gram_v += delta * gram.col(j);
          v[j] = updated;
          max_change = std::max(max_change, std::abs(delta));
        }
      }
      if (max_change < options.change_tol * (1.0 + v.cwiseAbs().maxCoeff()) &&
          kkt(v, gram_v, lambda) <= options.kkt_tol)
        return v;
    }
    std::ostringstream msg;
    msg << "coordinate descent did not converge in " << options.max_sweeps
        << " sweeps at lambda = " << lambda
        << " (kkt residual " << kkt(v, gram * v, lambda) << ")";
    throw ConvergenceError(msg.str());
  }
};

std::vector<std::pair<int, int>> support_of(const LassoProblem& problem,
                                            const Vector& v) {
  std::vector<std::pair<int, int>> support;
  for (int col = 0; col < v.size(); ++col)
    if (v[col] != 0.0) support.push_back(problem.column_to_pair(col));
  std::sort(support.begin(), support.end());
  return support;
}

Matrix reshape_action(const Vector& v, int q, int p) {
  return Eigen::Map<const Matrix>(v.data(), q, p);
}

}  // namespace

double lambda_max(const LassoProblem& problem) {
  return 2.0 *
         (problem.design.transpose() * problem.target).cwiseAbs().maxCoeff();
}

std::vector<double> lambda_grid(const LassoProblem& problem, int grid_size,
                                double ratio) {
  if (grid_size < 2) throw ConfigError("grid needs at least two points");
  if (ratio <= 0.0 || ratio >= 1.0)
    throw ConfigError("grid ratio must lie in (0, 1)");
  double top = lambda_max(problem);
  if (top <= 0.0)
    throw DegenerateGridError("target is zero: the solution path is identically zero");
  std::vector<double> grid(grid_size + 1);
  double log_top = std::log(top);
  double log_step = std::log(ratio) / (grid_size - 1);
  for (int i = 0; i < grid_size; ++i) grid[i] = std::exp(log_top + i * log_step);
  grid[0] = top;
  grid[grid_size - 1] = ratio * top;
  grid[grid_size] = 0.0;
  return grid;
}

Vector solve_lasso(const LassoProblem& problem, double lambda,
                   const Vector* warm_start, const SolveOptions& options) {
  if (lambda < 0.0) throw InvalidParameterError("lambda must be nonnegative");
  Workspace workspace(problem);
  Vector start = warm_start != nullptr
                     ? *warm_start
                     : Vector::Zero(problem.design.cols()).eval();
  return workspace.solve(lambda, std::move(start), options);
}

double kkt_violation(const LassoProblem& problem, const Vector& v,
                     double lambda) {
  Workspace workspace(problem);
  return workspace.kkt(v, workspace.gram * v, lambda);
}

double lasso_objective(const LassoProblem& problem, const Vector& v,
                       double lambda) {
  return (problem.design * v - problem.target).squaredNorm() +
         lambda * v.lpNorm<1>();
}

SummaryPath solve_path(const LassoProblem& problem,
                       const std::vector<double>& grid,
                       const SolveOptions& options) {
  if (grid.empty()) throw ConfigError("empty penalty grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] >= grid[i - 1])
      throw ConfigError("penalty grid must be strictly decreasing");

  Workspace workspace(problem);
  SummaryPath path;
  path.lambdas = grid;
  Vector v = Vector::Zero(problem.design.cols());
  for (double lambda : grid) {
    v = workspace.solve(lambda, v, options);
    path.gammas.push_back(reshape_action(v, problem.q, problem.p));
    path.supports.push_back(support_of(problem, v));
  }
  if (grid.back() == 0.0) {
    path.gamma_star = path.gammas.back();
  } else {
    Vector star = workspace.solve(0.0, v, options);
    path.gamma_star = reshape_action(star, problem.q, problem.p);
  }
  return path;
}

}  // namespace sursum
