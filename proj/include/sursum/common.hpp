#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace sursum {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexVector = Eigen::ArrayXi;

// Error taxonomy. Callers that need to recover (e.g. the model-space sweep
// treating a rank-deficient candidate as excluded) catch by type.
struct InvalidParameterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularDesignError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IllConditionedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateGridError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IngestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent substream for (seed, stream); used for per-replicate draws so
// results do not depend on evaluation order.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x51ed2701)));
}

inline Vector normal_vector(int n, Rng& rng) {
  std::normal_distribution<double> z;
  Vector out(n);
  for (int i = 0; i < n; ++i) out[i] = z(rng);
  return out;
}

// Compensated accumulation; keeps reported means independent of how a
// reduction is chunked.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

// Linear-interpolation quantile on a sorted vector.
inline double quantile_sorted(const std::vector<double>& sorted, double prob) {
  if (sorted.empty()) throw InvalidParameterError("quantile of empty sample");
  if (sorted.size() == 1) return sorted[0];
  double h = prob * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(h);
  if (lo >= sorted.size() - 1) return sorted.back();
  double w = h - static_cast<double>(lo);
  return sorted[lo] * (1.0 - w) + sorted[lo + 1] * w;
}

// Fixed 12-significant-digit format used by every table emitter.
std::string format_number(double v);

inline double log_sum_exp(double a, double b) {
  double m = a > b ? a : b;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace sursum
