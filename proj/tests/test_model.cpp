#include "sursum/model.hpp"

#include <doctest.h>

#include "test_helpers.hpp"

using namespace sursum;

namespace {

JointParams scalar_params(double beta, double sigma_x_idio, double b,
                          double psi_tilde) {
  JointParams params;
  params.beta = Matrix::Constant(1, 1, beta);
  params.b = Vector::Constant(1, b);
  params.psi_tilde = Vector::Constant(1, psi_tilde);
  params.loadings = Matrix::Zero(1, 0);
  params.idio = Vector::Constant(1, sigma_x_idio);
  params.mu_x = Vector::Zero(1);
  params.mu_y = Vector::Zero(1);
  params.alpha = IndexVector::Ones(1);
  return params;
}

JointParams random_params(int p, int q, int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(0.3, 1.5);
  JointParams params;
  params.beta = oracle::random_matrix(p, q, rng);
  params.b = oracle::random_matrix(q, 1, rng).col(0);
  params.psi_tilde.resize(q);
  for (int j = 0; j < q; ++j) params.psi_tilde[j] = pos(rng);
  params.loadings = oracle::random_matrix(p, k, rng) * 0.6;
  params.idio.resize(p);
  for (int i = 0; i < p; ++i) params.idio[i] = pos(rng);
  params.mu_x = oracle::random_matrix(p, 1, rng).col(0);
  params.mu_y = oracle::random_matrix(q, 1, rng).col(0);
  params.alpha = IndexVector::Ones(p);
  return params;
}

}  // namespace

TEST_CASE("centering removes column means and records them") {
  std::mt19937_64 rng(7);
  Dataset data;
  data.Y = oracle::random_matrix(40, 3, rng);
  data.X = oracle::random_matrix(40, 2, rng);
  data.Y.array() += 2.0;
  CenteredData centered = center(data);
  CHECK(centered.data.Y.colwise().mean().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(centered.data.X.colwise().mean().cwiseAbs().maxCoeff() < 1e-12);
  CHECK((centered.mean_y - data.Y.colwise().mean().transpose()).norm() == 0.0);
}

TEST_CASE("dataset validation") {
  Dataset data;
  data.Y = Matrix::Zero(5, 2);
  data.X = Matrix::Zero(4, 2);
  CHECK_THROWS_AS(validate(data), InvalidParameterError);

  data.X = Matrix::Zero(5, 4);  // N = 5 <= p + 1
  CHECK_THROWS_AS(validate(data), InvalidParameterError);

  data.X = Matrix::Zero(5, 2);
  data.X(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(validate(data), InvalidParameterError);
}

TEST_CASE("block covariance: zero coefficients give a block diagonal") {
  std::mt19937_64 rng(11);
  JointParams params = random_params(3, 2, 2, rng);
  params.beta.setZero();
  Matrix sigma = block_covariance(params);
  CHECK(sigma.topRightCorner(2, 3).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sigma.bottomLeftCorner(3, 2).cwiseAbs().maxCoeff() == 0.0);
  CHECK((sigma.topLeftCorner(2, 2) - params.psi()).norm() == 0.0);
  CHECK((sigma.bottomRightCorner(3, 3) - params.sigma_x()).norm() == 0.0);
}

TEST_CASE("block covariance: scalar case") {
  // beta = 2, sigma_x = 1, psi = b^2 + psi~ = 3
  JointParams params = scalar_params(2.0, 1.0, 1.0, 2.0);
  Matrix sigma = block_covariance(params);
  CHECK(sigma(0, 0) == doctest::Approx(7.0).epsilon(1e-14));
  CHECK(sigma(0, 1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(sigma(1, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(sigma(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("block covariance: symmetric, positive definite, identity block") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    JointParams params = random_params(3, 2, 2, rng);
    Matrix sigma = block_covariance(params);
    CHECK((sigma - sigma.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
    // upper-left block minus psi equals beta' Sx beta
    Matrix cross_term = params.beta.transpose() * params.sigma_x() * params.beta;
    Matrix recovered = sigma.topLeftCorner(2, 2) - params.psi();
    CHECK((recovered - cross_term).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("block covariance matches Monte Carlo covariance") {
  std::mt19937_64 seed_rng(17);
  JointParams params = random_params(3, 2, 2, seed_rng);
  Matrix sigma = block_covariance(params);
  const int q = 2, p = 3;

  Rng rng = make_rng(2024);
  const int samples = 1000000;
  Vector mean = Vector::Zero(q + p);
  Matrix second = Matrix::Zero(q + p, q + p);
  for (int s = 0; s < samples; ++s) {
    PredictiveDraw draw = sample_predictive(params, rng);
    Vector stacked(q + p);
    stacked << draw.y, draw.x;
    mean += stacked;
    second.selfadjointView<Eigen::Lower>().rankUpdate(stacked);
  }
  mean /= samples;
  second.triangularView<Eigen::StrictlyUpper>() =
      second.triangularView<Eigen::StrictlyLower>().transpose();
  Matrix cov = second / samples - mean * mean.transpose();

  for (int r = 0; r < q + p; ++r)
    for (int c = 0; c < q + p; ++c) {
      double se = std::sqrt(
          (sigma(r, r) * sigma(c, c) + sigma(r, c) * sigma(r, c)) / samples);
      CHECK(std::abs(cov(r, c) - sigma(r, c)) < 5.0 * se + 1e-12);
    }
}

TEST_CASE("block covariance rejects non-finite parameters") {
  std::mt19937_64 rng(19);
  JointParams params = random_params(2, 2, 1, rng);
  params.beta(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(block_covariance(params), InvalidParameterError);
}

TEST_CASE("joint parameter invariants") {
  std::mt19937_64 rng(23);
  JointParams params = random_params(3, 2, 1, rng);
  params.alpha[1] = 0;
  CHECK_THROWS_AS(validate(params), InvalidParameterError);  // beta row not zero
  params.beta.row(1).setZero();
  CHECK_NOTHROW(validate(params));
  params.psi_tilde[0] = 0.0;
  CHECK_THROWS_AS(validate(params), InvalidParameterError);
}

TEST_CASE("precision_of_psi matches a dense inverse") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_real_distribution<double> pos(0.2, 2.0);
    int q = 1 + static_cast<int>(rng() % 5);
    Vector b = oracle::random_matrix(q, 1, rng).col(0);
    Vector psi_tilde(q);
    for (int j = 0; j < q; ++j) psi_tilde[j] = pos(rng);
    Matrix psi = b * b.transpose();
    psi.diagonal() += psi_tilde;
    Matrix direct = psi.inverse();
    Matrix fast = precision_of_psi(b, psi_tilde);
    CHECK((direct - fast).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("predictive draws: degenerate noise reduces y to the linear map") {
  JointParams params;
  const int d = 3;
  params.beta = Matrix::Identity(d, d);
  params.b = Vector::Zero(d);
  params.psi_tilde = Vector::Constant(d, 1e-300);
  params.loadings = Matrix::Zero(d, 0);
  params.idio = Vector::Ones(d);
  params.mu_x = Vector::Constant(d, 0.5);
  params.mu_y = Vector::Constant(d, -1.0);
  params.alpha = IndexVector::Ones(d);

  Rng rng = make_rng(5);
  PredictiveDraw draw = sample_predictive(params, rng);
  CHECK(((draw.y - params.mu_y) - (draw.x - params.mu_x)).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("predictive draws: first and second moments") {
  std::mt19937_64 seed_rng(31);
  JointParams params = random_params(3, 2, 1, seed_rng);
  Rng rng = make_rng(77);

  const int n_mean = 100000;
  Vector x_sum = Vector::Zero(3);
  for (int s = 0; s < n_mean; ++s) x_sum += sample_predictive(params, rng).x;
  Vector x_mean = x_sum / n_mean;
  Matrix sigma_x = params.sigma_x();
  for (int i = 0; i < 3; ++i) {
    double se = std::sqrt(sigma_x(i, i) / n_mean);
    CHECK(std::abs(x_mean[i] - params.mu_x[i]) < 4.0 * se);
  }

  // cov(y, x) should match beta' Sx
  const int n_cov = 1000000;
  Matrix cross_sum = Matrix::Zero(2, 3);
  for (int s = 0; s < n_cov; ++s) {
    PredictiveDraw draw = sample_predictive(params, rng);
    cross_sum += (draw.y - params.mu_y) * (draw.x - params.mu_x).transpose();
  }
  Matrix cross = cross_sum / n_cov;
  Matrix expected = params.beta.transpose() * sigma_x;
  Matrix joint = block_covariance(params);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) {
      double se = std::sqrt(
          (joint(r, r) * joint(2 + c, 2 + c) + expected(r, c) * expected(r, c)) /
          n_cov);
      CHECK(std::abs(cross(r, c) - expected(r, c)) < 5.0 * se + 1e-12);
    }
}

TEST_CASE("predictive draws are deterministic given the generator state") {
  std::mt19937_64 seed_rng(37);
  JointParams params = random_params(3, 2, 2, seed_rng);
  Rng a = make_rng(123), b = make_rng(123);
  for (int s = 0; s < 50; ++s) {
    PredictiveDraw da = sample_predictive(params, a);
    PredictiveDraw db = sample_predictive(params, b);
    CHECK((da.x - db.x).cwiseAbs().maxCoeff() == 0.0);
    CHECK((da.y - db.y).cwiseAbs().maxCoeff() == 0.0);
  }
}
