#include "sursum/synthetic.hpp"

#include <sstream>

namespace sursum {

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 4 || spec.p < 1 || spec.q < 1)
    throw ConfigError("synthetic dimensions too small");
  for (int i : spec.active)
    if (i < 0 || i >= spec.p)
      throw ConfigError("active predictor index out of range");
  if (spec.x_factors < 0 || spec.x_factors > spec.p)
    throw ConfigError("x_factors must lie in [0, p]");

  Rng rng = make_rng(spec.seed);
  std::uniform_real_distribution<double> magnitude(spec.signal_low,
                                                   spec.signal_high);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> z;

  SyntheticData out;
  out.active = spec.active;

  // predictor factor structure
  Matrix x_loadings(spec.p, spec.x_factors);
  for (int i = 0; i < x_loadings.size(); ++i)
    x_loadings(i % spec.p, i / spec.p) = spec.x_loading_sd * z(rng);
  out.sigma_x = x_loadings * x_loadings.transpose();
  out.sigma_x.diagonal().array() += spec.x_idio;

  // coefficients: dense on active rows, exactly zero elsewhere
  out.beta = Matrix::Zero(spec.p, spec.q);
  for (int i : spec.active)
    for (int j = 0; j < spec.q; ++j)
      out.beta(i, j) = (unit(rng) < 0.5 ? -1.0 : 1.0) * magnitude(rng);

  out.b = Vector::Constant(spec.q, spec.residual_loading);
  out.psi_tilde = Vector::Constant(spec.q, spec.idio_noise);

  Vector mu_x(spec.p), mu_y(spec.q);
  for (int i = 0; i < spec.p; ++i) mu_x[i] = spec.mean_scale * z(rng);
  for (int j = 0; j < spec.q; ++j) mu_y[j] = spec.mean_scale * z(rng);

  Matrix x(spec.n, spec.p), y(spec.n, spec.q);
  Vector psi_sd = out.psi_tilde.cwiseSqrt();
  for (int t = 0; t < spec.n; ++t) {
    Vector xc = Vector::Zero(spec.p);
    if (spec.x_factors > 0)
      xc = x_loadings * normal_vector(spec.x_factors, rng);
    for (int i = 0; i < spec.p; ++i) xc[i] += std::sqrt(spec.x_idio) * z(rng);
    x.row(t) = (mu_x + xc).transpose();

    double shared = z(rng);
    Vector yc = out.beta.transpose() * xc;
    for (int j = 0; j < spec.q; ++j)
      yc[j] += out.b[j] * shared + psi_sd[j] * z(rng);
    y.row(t) = (mu_y + yc).transpose();
  }

  out.data.Y = y;
  out.data.X = x;
  for (int j = 0; j < spec.q; ++j) {
    std::ostringstream name;
    name << "resp" << j + 1;
    out.data.response_names.push_back(name.str());
  }
  for (int i = 0; i < spec.p; ++i) {
    std::ostringstream name;
    name << "pred" << i + 1;
    out.data.predictor_names.push_back(name.str());
  }
  validate(out.data);
  return out;
}

std::vector<std::pair<int, int>> true_links(const SyntheticData& truth) {
  std::vector<std::pair<int, int>> links;
  const int p = static_cast<int>(truth.beta.rows());
  const int q = static_cast<int>(truth.beta.cols());
  for (int j = 0; j < q; ++j)
    for (int i = 0; i < p; ++i)
      if (truth.beta(i, j) != 0.0) links.emplace_back(j, i);
  std::sort(links.begin(), links.end());
  return links;
}

}  // namespace sursum
