#include "sursum/summary.hpp"

#include <sstream>

namespace sursum {

Matrix cholesky_with_jitter(const Matrix& sym, const char* label) {
  const int dim = static_cast<int>(sym.rows());
  double base = 1e-10 * sym.trace() / dim;
  double jitter = 0.0;
  for (int attempt = 0; attempt <= 6; ++attempt) {
    Matrix work = sym;
    if (attempt > 0) {
      jitter = attempt == 1 ? base : jitter * 10.0;
      work.diagonal().array() += jitter;
    }
    Eigen::LLT<Matrix> llt(work);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  std::ostringstream msg;
  msg << "ill-conditioned " << label << " matrix: Cholesky failed after max jitter";
  throw IllConditionedError(msg.str());
}

MomentSet make_moment_set(Matrix A, Matrix S, Matrix M, PredictorMode mode) {
  MomentSet out;
  out.A = std::move(A);
  out.S = std::move(S);
  out.M = std::move(M);
  out.mode = mode;
  if (out.A.rows() != out.M.rows() || out.A.cols() != out.S.rows() ||
      out.S.rows() != out.S.cols() || out.M.rows() != out.M.cols())
    throw InvalidParameterError("moment dimension mismatch");
  out.L = cholesky_with_jitter(out.M, "M");
  out.Q = cholesky_with_jitter(out.S, "S");
  return out;
}

MomentSet compute_moments(const std::vector<PosteriorDraw>& draws,
                          PredictorMode mode, const Matrix* X_observed) {
  if (draws.empty()) throw InvalidParameterError("no posterior draws");
  const int p = static_cast<int>(draws.front().params.beta.rows());
  const int q = static_cast<int>(draws.front().params.beta.cols());
  if (mode == PredictorMode::kFixed && X_observed == nullptr)
    throw InvalidParameterError("fixed mode requires the observed design");

  Matrix a_sum = Matrix::Zero(q, p);
  Matrix m_sum = Matrix::Zero(q, q);
  const double count = static_cast<double>(draws.size());

  if (mode == PredictorMode::kRandom) {
    Matrix s_sum = Matrix::Zero(p, p);
    for (const auto& draw : draws) {
      Matrix omega =
          precision_of_psi(draw.params.b, draw.params.psi_tilde);
      Matrix sigma_x = draw.params.sigma_x();
      a_sum += omega * draw.params.beta.transpose() * sigma_x;
      s_sum += sigma_x;
      m_sum += omega;
    }
    Matrix s_mean = s_sum / count;
    s_mean = 0.5 * (s_mean + s_mean.transpose()).eval();
    Matrix m_mean = m_sum / count;
    m_mean = 0.5 * (m_mean + m_mean.transpose()).eval();
    return make_moment_set(a_sum / count, s_mean, m_mean, mode);
  }

  Matrix sxx = X_observed->transpose() * (*X_observed);
  sxx = 0.5 * (sxx + sxx.transpose()).eval();
  for (const auto& draw : draws) {
    Matrix omega = precision_of_psi(draw.params.b, draw.params.psi_tilde);
    a_sum += omega * draw.params.beta.transpose();
    m_sum += omega;
  }
  Matrix m_mean = m_sum / count;
  m_mean = 0.5 * (m_mean + m_mean.transpose()).eval();
  return make_moment_set((a_sum / count) * sxx, sxx, m_mean, mode);
}

LassoProblem build_lasso_problem(const MomentSet& moments) {
  const int p = moments.p();
  const int q = moments.q();
  LassoProblem out;
  out.p = p;
  out.q = q;

  // design = Q' (x) L'
  out.design.resize(p * q, p * q);
  for (int ib = 0; ib < p; ++ib)
    for (int jb = 0; jb < p; ++jb)
      out.design.block(ib * q, jb * q, q, q) =
          moments.Q(jb, ib) * moments.L.transpose();

  // target = vec(L^{-1} A Q^{-T}) by triangular solves
  Matrix w = moments.L.triangularView<Eigen::Lower>().solve(moments.A);
  Matrix t = moments.Q.triangularView<Eigen::Lower>()
                 .solve(w.transpose())
                 .transpose();
  out.target = Eigen::Map<const Vector>(t.data(), t.size());
  return out;
}

Matrix unpenalized_summary(const MomentSet& moments) {
  // M^{-1} A
  Matrix w = moments.L.triangularView<Eigen::Lower>().solve(moments.A);
  w = moments.L.transpose().triangularView<Eigen::Upper>().solve(w);
  // (.) S^{-1} through S' = S
  Matrix t = moments.Q.triangularView<Eigen::Lower>().solve(w.transpose());
  t = moments.Q.transpose().triangularView<Eigen::Upper>().solve(t);
  return t.transpose();
}

}  // namespace sursum
