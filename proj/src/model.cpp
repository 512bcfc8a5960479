#include "sursum/model.hpp"

#include <cmath>
#include <sstream>

namespace sursum {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void validate(const Dataset& data) {
  if (data.Y.rows() != data.X.rows()) {
    std::ostringstream msg;
    msg << "response rows (" << data.Y.rows() << ") != predictor rows ("
        << data.X.rows() << ")";
    throw InvalidParameterError(msg.str());
  }
  if (data.Y.cols() == 0 || data.X.cols() == 0)
    throw InvalidParameterError("dataset has an empty response or predictor block");
  if (data.n() <= data.p() + 1) {
    std::ostringstream msg;
    msg << "need N > p + 1, got N = " << data.n() << ", p = " << data.p();
    throw InvalidParameterError(msg.str());
  }
  if (!data.Y.allFinite() || !data.X.allFinite())
    throw InvalidParameterError("dataset contains non-finite values");
  if (!data.response_names.empty() &&
      static_cast<int>(data.response_names.size()) != data.q())
    throw InvalidParameterError("response name count mismatch");
  if (!data.predictor_names.empty() &&
      static_cast<int>(data.predictor_names.size()) != data.p())
    throw InvalidParameterError("predictor name count mismatch");
}

CenteredData center(const Dataset& data) {
  CenteredData out;
  out.mean_y = data.Y.colwise().mean();
  out.mean_x = data.X.colwise().mean();
  out.data = data;
  out.data.Y.rowwise() -= out.mean_y.transpose();
  out.data.X.rowwise() -= out.mean_x.transpose();
  return out;
}

Matrix JointParams::psi() const {
  Matrix out = b * b.transpose();
  out.diagonal() += psi_tilde;
  return out;
}

Matrix JointParams::sigma_x() const {
  const int p = static_cast<int>(idio.size());
  Matrix out;
  if (loadings.size() == 0) {
    out = Matrix::Zero(p, p);
  } else {
    out = Matrix::Zero(p, p);
    out.selfadjointView<Eigen::Lower>().rankUpdate(loadings);
    out.triangularView<Eigen::StrictlyUpper>() =
        out.triangularView<Eigen::StrictlyLower>().transpose();
  }
  out.diagonal() += idio;
  return out;
}

void validate(const JointParams& params) {
  const int p = static_cast<int>(params.beta.rows());
  const int q = static_cast<int>(params.beta.cols());
  if (params.b.size() != q || params.psi_tilde.size() != q ||
      params.mu_y.size() != q)
    throw InvalidParameterError("response-dimension mismatch in parameters");
  if (params.idio.size() != p || params.mu_x.size() != p ||
      params.alpha.size() != p ||
      (params.loadings.size() != 0 && params.loadings.rows() != p))
    throw InvalidParameterError("predictor-dimension mismatch in parameters");
  if (!params.beta.allFinite() || !params.b.allFinite() ||
      !params.psi_tilde.allFinite() || !params.loadings.allFinite() ||
      !params.idio.allFinite() || !params.mu_x.allFinite() ||
      !params.mu_y.allFinite())
    throw InvalidParameterError("non-finite parameter entry");
  if ((params.psi_tilde.array() <= 0.0).any())
    throw InvalidParameterError("psi_tilde entries must be positive");
  if ((params.idio.array() <= 0.0).any())
    throw InvalidParameterError("idiosyncratic variances must be positive");
  for (int i = 0; i < p; ++i) {
    if (params.alpha[i] != 0 && params.alpha[i] != 1)
      throw InvalidParameterError("alpha entries must be 0 or 1");
    if (params.alpha[i] == 0 && params.beta.row(i).cwiseAbs().maxCoeff() != 0.0)
      throw InvalidParameterError("beta row nonzero for an excluded predictor");
  }
}

Matrix precision_of_psi(const Vector& b, const Vector& psi_tilde) {
  if ((psi_tilde.array() <= 0.0).any())
    throw InvalidParameterError("psi_tilde entries must be positive");
  Vector u = b.array() / psi_tilde.array();  // psi_tilde^{-1} b
  double denom = 1.0 + b.dot(u);
  Matrix omega = (-1.0 / denom) * (u * u.transpose());
  omega.diagonal() += psi_tilde.cwiseInverse();
  return omega;
}

Matrix block_covariance(const JointParams& params) {
  validate(params);
  const int p = static_cast<int>(params.beta.rows());
  const int q = static_cast<int>(params.beta.cols());
  Matrix sx = params.sigma_x();
  Matrix cross = params.beta.transpose() * sx;  // q x p
  Matrix yy = cross * params.beta;              // beta' Sx beta
  yy = 0.5 * (yy + yy.transpose()).eval();
  yy += params.psi();

  Matrix out(q + p, q + p);
  out.topLeftCorner(q, q) = yy;
  out.topRightCorner(q, p) = cross;
  out.bottomLeftCorner(p, q) = cross.transpose();
  out.bottomRightCorner(p, p) = sx;
  return out;
}

PredictiveDraw sample_predictive(const JointParams& params, Rng& rng) {
  validate(params);
  const int p = static_cast<int>(params.beta.rows());
  const int q = static_cast<int>(params.beta.cols());
  const int k = static_cast<int>(params.loadings.cols());

  Vector x_centered = Vector::Zero(p);
  if (k > 0) x_centered = params.loadings * normal_vector(k, rng);
  x_centered += params.idio.cwiseSqrt().cwiseProduct(normal_vector(p, rng));

  std::normal_distribution<double> z;
  Vector eps = params.b * z(rng);
  eps += params.psi_tilde.cwiseSqrt().cwiseProduct(normal_vector(q, rng));

  PredictiveDraw out;
  out.x = params.mu_x + x_centered;
  out.y = params.mu_y + params.beta.transpose() * x_centered + eps;
  return out;
}

}  // namespace sursum
