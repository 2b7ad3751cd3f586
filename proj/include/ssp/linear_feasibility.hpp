#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <algorithm>
#include <stdexcept>
#include <vector>

#include "ssp/linalg.hpp"
#include "ssp/random.hpp"
#include "ssp/simple_set.hpp"

namespace ssp {

/// Frobenius-weight distribution over matrix blocks:
/// weight_i = ||block_i||_F^2 / sum_j ||block_j||_F^2.
inline std::vector<double> frobenius_distribution(
    const std::vector<Eigen::MatrixXd>& blocks) {
  if (blocks.empty())
    throw std::invalid_argument("frobenius_distribution: no blocks");
  std::vector<double> weights(blocks.size());
  double total = 0.0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    weights[i] = blocks[i].squaredNorm();
    total += weights[i];
  }
  if (total <= 0.0)
    throw std::invalid_argument("frobenius_distribution: all-zero matrix");
  for (double& w : weights) w /= total;
  return weights;
}

/// Contiguous block partition of a row range [0, rows).
struct BlockPartition {
  std::vector<Eigen::Index> starts;  ///< starts.back() == rows (sentinel)

  static BlockPartition uniform(Eigen::Index rows, Eigen::Index block_size) {
    if (block_size <= 0)
      throw std::invalid_argument("BlockPartition: block size <= 0");
    BlockPartition p;
    for (Eigen::Index r = 0; r < rows; r += block_size) p.starts.push_back(r);
    p.starts.push_back(rows);
    return p;
  }

  std::size_t count() const {
    return starts.empty() ? 0 : starts.size() - 1;
  }
  Eigen::Index begin(std::size_t i) const { return starts[i]; }
  Eigen::Index size(std::size_t i) const { return starts[i + 1] - starts[i]; }
};

/// find x in Y with Ax = b and Cx <= d. Equality rows are sampled in
/// (contiguous) blocks; inequality rows are sampled singly, which keeps the
/// feasibility update closed-form. Row storage is CSR (dense inputs are
/// converted), so both dense and sparse data pass through one code path.
struct LinearFeasibilityProblem {
  RowMatrix A;  ///< m x n
  Vector b;
  RowMatrix C;  ///< p x n
  Vector d;
  SimpleSet Y = SimpleSet::whole_space();
  BlockPartition eq_blocks;
  Categorical eq_dist;    ///< over equality blocks
  Categorical ineq_dist;  ///< over inequality rows

  Eigen::Index dimension() const { return A.cols() > 0 ? A.cols() : C.cols(); }
  Eigen::Index num_eq_rows() const { return A.rows(); }
  Eigen::Index num_ineq_rows() const { return C.rows(); }

  static LinearFeasibilityProblem create(RowMatrix A, Vector b, RowMatrix C,
                                         Vector d,
                                         SimpleSet Y = SimpleSet::whole_space(),
                                         Eigen::Index eq_block_size = 1) {
    if (A.rows() != b.size())
      throw std::invalid_argument("LinearFeasibilityProblem: A/b mismatch");
    if (C.rows() != d.size())
      throw std::invalid_argument("LinearFeasibilityProblem: C/d mismatch");
    if (A.rows() > 0 && C.rows() > 0 && A.cols() != C.cols())
      throw std::invalid_argument("LinearFeasibilityProblem: A/C mismatch");

    LinearFeasibilityProblem prob;
    prob.A = std::move(A);
    prob.b = std::move(b);
    prob.C = std::move(C);
    prob.d = std::move(d);
    prob.Y = std::move(Y);
    prob.A.makeCompressed();
    prob.C.makeCompressed();
    prob.eq_blocks = BlockPartition::uniform(prob.A.rows(), eq_block_size);

    if (prob.eq_blocks.count() > 0) {
      std::vector<double> w(prob.eq_blocks.count());
      for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = prob.A
                   .middleRows(prob.eq_blocks.begin(i), prob.eq_blocks.size(i))
                   .squaredNorm();
      prob.eq_dist = Categorical(std::move(w));
    }
    if (prob.C.rows() > 0) {
      std::vector<double> w(prob.C.rows());
      for (Eigen::Index i = 0; i < prob.C.rows(); ++i)
        w[static_cast<std::size_t>(i)] = prob.C.row(i).squaredNorm();
      prob.ineq_dist = Categorical(std::move(w));
    }
    return prob;
  }

  static LinearFeasibilityProblem create_dense(
      const Eigen::MatrixXd& A, Vector b, const Eigen::MatrixXd& C, Vector d,
      SimpleSet Y = SimpleSet::whole_space(), Eigen::Index eq_block_size = 1) {
    return create(A.sparseView(), std::move(b), C.sparseView(), std::move(d),
                  std::move(Y), eq_block_size);
  }

  double eq_residual(const Vector& x) const {
    if (A.rows() == 0) return 0.0;
    return (A * x - b).norm();
  }

  double ineq_residual(const Vector& x) const {
    if (C.rows() == 0) return 0.0;
    return (C * x - d).cwiseMax(0.0).norm();
  }

  /// Dense copy of one equality block, for diagnostics.
  Eigen::MatrixXd eq_block_dense(std::size_t i) const {
    return Eigen::MatrixXd(
        A.middleRows(eq_blocks.begin(i), eq_blocks.size(i)));
  }
};

/// Maximum block condition number over the equality blocks:
/// max sigma_max / sigma_min+ per block. Zero blocks are skipped.
inline double kappa_block(const LinearFeasibilityProblem& prob) {
  double kappa = 0.0;
  for (std::size_t i = 0; i < prob.eq_blocks.count(); ++i) {
    const double k = block_condition_number(prob.eq_block_dense(i));
    kappa = std::max(kappa, k);
  }
  if (kappa == 0.0)
    throw std::invalid_argument("kappa_block: all equality blocks are zero");
  return kappa;
}

inline double kappa_block(const std::vector<Eigen::MatrixXd>& blocks) {
  double kappa = 0.0;
  for (const auto& blk : blocks)
    kappa = std::max(kappa, block_condition_number(blk));
  if (kappa == 0.0) throw std::invalid_argument("kappa_block: all blocks zero");
  return kappa;
}

/// Contraction factor of the linear-rate bound:
/// 1 - (1/c) min( delta(2-delta)/(2 kappa^2), (2-delta)/(4 delta),
///                beta(2-beta)/2 ). Diagnostic only: c is user-supplied.
inline double theoretical_contraction(double delta, double beta, double kappa,
                                      double c) {
  if (delta <= 0.0 || delta >= 2.0 || beta <= 0.0 || beta >= 2.0)
    throw std::invalid_argument("theoretical_contraction: delta/beta outside (0,2)");
  if (kappa < 1.0 || c <= 0.0)
    throw std::invalid_argument("theoretical_contraction: need kappa >= 1, c > 0");
  const double term1 = delta * (2.0 - delta) / (2.0 * kappa * kappa);
  const double term2 = (2.0 - delta) / (4.0 * delta);
  const double term3 = beta * (2.0 - beta) / 2.0;
  return 1.0 - std::min({term1, term2, term3}) / c;
}

}  // namespace ssp
