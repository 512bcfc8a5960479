#include "sursum/factor.hpp"

#include <Eigen/Cholesky>

namespace sursum {

namespace {

void check_config(int p, const FactorConfig& config) {
  if (config.k < 0 || config.k > p)
    throw ConfigError("factor count must satisfy 0 <= k <= p");
  if (config.prior_scale_loadings <= 0.0 || config.prior_shape_idio <= 0.0 ||
      config.prior_scale_idio <= 0.0 || config.prior_var_mu <= 0.0)
    throw ConfigError("factor prior hyperparameters must be positive");
}

double draw_inverse_gamma(double shape, double rate, Rng& rng) {
  std::gamma_distribution<double> g(shape, 1.0);
  double x = g(rng);
  if (x <= 0.0) x = std::numeric_limits<double>::min();
  return rate / x;
}

}  // namespace

FactorState init_factor_state(const Matrix& X, const FactorConfig& config) {
  const int p = static_cast<int>(X.cols());
  const int n = static_cast<int>(X.rows());
  check_config(p, config);
  FactorState state;
  state.loadings = Matrix::Zero(p, config.k);
  Vector mean = X.colwise().mean();
  state.idio = ((X.rowwise() - mean.transpose()).colwise().squaredNorm() /
                std::max(n - 1, 1))
                   .transpose();
  state.idio = state.idio.cwiseMax(1e-8);
  state.mu = Vector::Zero(p);
  state.scores = Matrix::Zero(n, config.k);
  return state;
}

void gibbs_sweep_factor(const Matrix& X, FactorState& state,
                        const FactorConfig& config, Rng& rng) {
  const int p = static_cast<int>(X.cols());
  const int n = static_cast<int>(X.rows());
  const int k = config.k;
  check_config(p, config);
  if ((state.idio.array() <= 0.0).any())
    throw InvalidParameterError("idiosyncratic variances must be positive");

  Matrix centered = X.rowwise() - state.mu.transpose();  // n x p

  if (k > 0) {
    // scores: f_t ~ N(V B' D^{-1} r_t, V), V = (I + B' D^{-1} B)^{-1}
    Matrix bdi = state.loadings.transpose() *
                 state.idio.cwiseInverse().asDiagonal();  // k x p
    Matrix prec = Matrix::Identity(k, k) + bdi * state.loadings;
    Eigen::LLT<Matrix> llt(prec);
    Matrix mean_t = llt.solve(bdi * centered.transpose());  // k x n
    // V = Lp^{-T} Lp^{-1}; draw = mean + Lp^{-T} z
    Matrix lp = llt.matrixL();
    for (int t = 0; t < n; ++t) {
      Vector z = normal_vector(k, rng);
      state.scores.row(t) =
          (mean_t.col(t) + lp.transpose().triangularView<Eigen::Upper>().solve(z))
              .transpose();
    }

    // loading rows: B_j ~ N(Vj F' r_j / idio_j, Vj)
    Matrix ftf = state.scores.transpose() * state.scores;
    for (int j = 0; j < p; ++j) {
      Matrix precj = ftf / state.idio[j];
      precj.diagonal().array() += 1.0 / config.prior_scale_loadings;
      Eigen::LLT<Matrix> lltj(precj);
      Vector rhs = state.scores.transpose() * centered.col(j) / state.idio[j];
      Vector mean = lltj.solve(rhs);
      Matrix lj = lltj.matrixL();
      Vector z = normal_vector(k, rng);
      state.loadings.row(j) =
          (mean + lj.transpose().triangularView<Eigen::Upper>().solve(z))
              .transpose();
    }
  }

  // idiosyncratic variances
  Matrix resid = centered;
  if (k > 0) resid -= state.scores * state.loadings.transpose();
  for (int j = 0; j < p; ++j) {
    double shape = config.prior_shape_idio + 0.5 * n;
    double rate = config.prior_scale_idio + 0.5 * resid.col(j).squaredNorm();
    state.idio[j] = draw_inverse_gamma(shape, rate, rng);
  }

  // mean, conjugate under mu_j ~ N(0, prior_var_mu)
  Matrix demeaned = X;
  if (k > 0) demeaned -= state.scores * state.loadings.transpose();
  std::normal_distribution<double> z;
  for (int j = 0; j < p; ++j) {
    double prec = n / state.idio[j] + 1.0 / config.prior_var_mu;
    double mean = (demeaned.col(j).sum() / state.idio[j]) / prec;
    state.mu[j] = mean + z(rng) / std::sqrt(prec);
  }
}

Matrix sigma_x_of(const FactorState& state) {
  const int p = static_cast<int>(state.idio.size());
  Matrix out = Matrix::Zero(p, p);
  if (state.loadings.size() > 0) {
    out.selfadjointView<Eigen::Lower>().rankUpdate(state.loadings);
    out.triangularView<Eigen::StrictlyUpper>() =
        out.triangularView<Eigen::StrictlyLower>().transpose();
  }
  out.diagonal() += state.idio;
  return out;
}

}  // namespace sursum
