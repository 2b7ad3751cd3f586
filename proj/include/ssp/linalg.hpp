#pragma once

#include <Eigen/Core>
#include <Eigen/SVD>
#include <Eigen/SparseCore>
#include <cmath>

namespace ssp {

using RowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Largest singular value of a (block of a) matrix. Small blocks go through
/// a dense SVD; larger ones use power iteration on M'M.
template <typename Mat>
double spectral_norm(const Mat& m, double tol = 1e-10, int max_iter = 1000) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  if (m.rows() <= 64 && m.cols() <= 64) {
    Eigen::MatrixXd dense(m);
    return dense.jacobiSvd().singularValues()[0];
  }
  Eigen::VectorXd v = Eigen::VectorXd::Ones(m.cols()).normalized();
  double sigma = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd w = m.transpose() * (m * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    w /= nw;
    const double next = std::sqrt(nw);
    if (std::abs(next - sigma) <= tol * std::max(1.0, next)) {
      sigma = next;
      break;
    }
    sigma = next;
    v = w;
  }
  return sigma;
}

/// sigma_max / sigma_min+ of a dense block (smallest nonzero singular value
/// in the denominator). Returns 0 for an all-zero block.
inline double block_condition_number(const Eigen::MatrixXd& block,
                                     double rank_tol = 1e-12) {
  if (block.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
  const auto& s = svd.singularValues();
  const double smax = s[0];
  if (smax <= 0.0) return 0.0;
  double smin = smax;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > rank_tol * smax) smin = s[i];
  return smax / smin;
}

}  // namespace ssp
