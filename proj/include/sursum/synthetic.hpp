#pragma once

#include "sursum/model.hpp"

#include <vector>

namespace sursum {

// Benchmark generator: X from a low-rank-plus-diagonal factor model, Y from
// the linear model with a dense residual covariance b b' + diag(psi_tilde).
struct SyntheticSpec {
  int n = 500;
  int p = 10;
  int q = 5;
  std::vector<int> active;        // predictor indices with signal
  double signal_low = 1.1;        // |coefficient| range on active rows
  double signal_high = 1.7;
  double residual_loading = 0.5;  // entries of b
  double idio_noise = 0.4;        // psi_tilde entries
  int x_factors = 2;
  double x_loading_sd = 0.3;
  double x_idio = 1.0;
  double mean_scale = 0.3;        // column means, drawn once
  std::uint64_t seed = 1;
};

struct SyntheticData {
  Dataset data;
  Matrix beta;        // p x q generating coefficients
  Vector b;           // q
  Vector psi_tilde;   // q
  Matrix sigma_x;     // p x p generating covariance
  std::vector<int> active;
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

// True (response, predictor) links: every response paired with every active
// predictor whose generating coefficient is nonzero.
std::vector<std::pair<int, int>> true_links(const SyntheticData& truth);

}  // namespace sursum
