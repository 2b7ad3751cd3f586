#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <memory>
#include <stdexcept>
#include <vector>

#include "ssp/linear_feasibility.hpp"
#include "ssp/problem.hpp"
#include "ssp/prox.hpp"
#include "ssp/ssp_solver.hpp"

namespace ssp {

/// Two-class dataset: sparse feature rows z_i with labels y_i in {-1,+1}.
struct LabeledDataset {
  RowMatrix features;  ///< N x n_feat
  Vector labels;       ///< entries strictly +-1

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index num_features() const { return features.cols(); }

  Vector feature_row(Eigen::Index i) const {
    Vector z = Vector::Zero(features.cols());
    for (RowMatrix::InnerIterator it(features, i); it; ++it)
      z[it.col()] = it.value();
    return z;
  }

  void validate() const {
    if (features.rows() != labels.size())
      throw std::invalid_argument("LabeledDataset: feature/label count mismatch");
    for (Eigen::Index i = 0; i < labels.size(); ++i)
      if (labels[i] != 1.0 && labels[i] != -1.0)
        throw std::invalid_argument("LabeledDataset: labels must be +-1");
  }
};

/// Diagonal ellipsoidal uncertainty around each data point. The stored
/// diagonals are per-feature covariances; the noise scale rho in [0,1]
/// multiplies them. The ellipsoid shape matrix entering the cone
/// constraint is the inverse of the effective covariance rho*Q.
struct EllipsoidModel {
  enum class Mode { ClassDependent, ClassIndependent };

  Mode mode = Mode::ClassIndependent;
  Vector cov_plus;   ///< diagonal covariance for the +1 class
  Vector cov_minus;  ///< diagonal covariance for the -1 class (same as
                     ///< cov_plus in class-independent mode)
  double rho = 0.0;

  const Vector& covariance(double label) const {
    return (mode == Mode::ClassDependent && label < 0.0) ? cov_minus
                                                         : cov_plus;
  }

  /// Diagonal of the ellipsoid shape matrix, 1 / (rho * cov_j).
  /// Only meaningful for rho > 0 with strictly positive covariances.
  Vector shape_diag(double label) const {
    if (rho <= 0.0)
      throw std::invalid_argument("EllipsoidModel: shape matrix needs rho > 0");
    const Vector& q = covariance(label);
    if ((q.array() <= 0.0).any())
      throw std::invalid_argument(
          "EllipsoidModel: zero diagonal in effective rho*Q");
    return (1.0 / (rho * q.array())).matrix();
  }
};

/// Per-class diagonal sample covariances (class-dependent) or one pooled
/// variance replicated on the whole diagonal (class-independent).
/// Variances are population variances (denominator N_class).
inline EllipsoidModel covariance_from_data(const LabeledDataset& data,
                                           EllipsoidModel::Mode mode,
                                           double rho) {
  data.validate();
  if (rho < 0.0 || rho > 1.0)
    throw std::invalid_argument("covariance_from_data: rho outside [0,1]");
  const Eigen::Index n = data.num_features();

  auto class_variance = [&](double label) {
    Vector mean = Vector::Zero(n);
    long count = 0;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      if (data.labels[i] != label) continue;
      mean += data.feature_row(i);
      ++count;
    }
    if (count == 0)
      throw std::invalid_argument(
          "covariance_from_data: single-class data in class-dependent mode");
    mean /= static_cast<double>(count);
    Vector var = Vector::Zero(n);
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      if (data.labels[i] != label) continue;
      var += (data.feature_row(i) - mean).cwiseAbs2();
    }
    return Vector(var / static_cast<double>(count));
  };

  EllipsoidModel model;
  model.mode = mode;
  model.rho = rho;
  if (mode == EllipsoidModel::Mode::ClassDependent) {
    model.cov_plus = class_variance(+1.0);
    model.cov_minus = class_variance(-1.0);
  } else {
    // pooled variance over all samples and features, replicated
    Vector mean = Vector::Zero(n);
    for (Eigen::Index i = 0; i < data.size(); ++i) mean += data.feature_row(i);
    mean /= static_cast<double>(data.size());
    double pooled = 0.0;
    for (Eigen::Index i = 0; i < data.size(); ++i)
      pooled += (data.feature_row(i) - mean).squaredNorm();
    pooled /= static_cast<double>(data.size()) * static_cast<double>(n);
    model.cov_plus = Vector::Constant(n, pooled);
    model.cov_minus = model.cov_plus;
  }
  return model;
}

/// Constrained least squares as a linear feasibility problem, with
/// Frobenius sampling weights attached by construction.
inline LinearFeasibilityProblem build_constrained_ls(
    const Eigen::MatrixXd& A, Vector b, const Eigen::MatrixXd& C, Vector d,
    SimpleSet Y = SimpleSet::whole_space(), Eigen::Index eq_block_size = 1) {
  return LinearFeasibilityProblem::create_dense(A, std::move(b), C,
                                                std::move(d), std::move(Y),
                                                eq_block_size);
}

/// Primal-dual feasibility transform of the LP
///   min c'z  s.t.  C_lp z <= d_lp, z >= 0.
/// The unknown is x = (z, nu) >= 0 with one equality row c'z + d'nu = 0
/// and the stacked inequalities C_lp z <= d_lp and -C_lp' nu <= c.
inline LinearFeasibilityProblem build_lp_feasibility(
    const Vector& c, const RowMatrix& C_lp, const Vector& d_lp) {
  const Eigen::Index n = c.size();
  const Eigen::Index p = C_lp.rows();
  if (C_lp.cols() != n)
    throw std::invalid_argument("build_lp_feasibility: C/c dimension mismatch");
  if (d_lp.size() != p)
    throw std::invalid_argument("build_lp_feasibility: C/d dimension mismatch");

  RowMatrix A(1, n + p);
  {
    std::vector<Eigen::Triplet<double>> trips;
    for (Eigen::Index j = 0; j < n; ++j)
      if (c[j] != 0.0) trips.emplace_back(0, j, c[j]);
    for (Eigen::Index j = 0; j < p; ++j)
      if (d_lp[j] != 0.0) trips.emplace_back(0, n + j, d_lp[j]);
    A.setFromTriplets(trips.begin(), trips.end());
  }
  Vector b = Vector::Zero(1);

  RowMatrix C(p + n, n + p);
  {
    std::vector<Eigen::Triplet<double>> trips;
    for (Eigen::Index i = 0; i < p; ++i)
      for (RowMatrix::InnerIterator it(C_lp, i); it; ++it)
        trips.emplace_back(i, it.col(), it.value());
    // -C_lp' nu <= c, i.e. row j of the lower block is -(column j of C_lp)
    for (Eigen::Index i = 0; i < p; ++i)
      for (RowMatrix::InnerIterator it(C_lp, i); it; ++it)
        trips.emplace_back(p + it.col(), n + i, -it.value());
    C.setFromTriplets(trips.begin(), trips.end());
  }
  Vector d(p + n);
  d.head(p) = d_lp;
  d.tail(n) = c;

  return LinearFeasibilityProblem::create(std::move(A), std::move(b),
                                          std::move(C), std::move(d),
                                          SimpleSet::nonnegative_orthant());
}

/// Sparse linear SVM recast as an LP and then through the primal-dual
/// feasibility transform. LP variables, in order:
///   (w_plus[n], w_minus[n], d_plus, d_minus, u[N]),  all >= 0,
/// with w = w_plus - w_minus, d = d_plus - d_minus and
/// objective sum(w_plus) + sum(w_minus) + lambda * sum(u).
struct SvmLpModel {
  LinearFeasibilityProblem problem;
  Eigen::Index n_feat = 0;
  Eigen::Index n_data = 0;
  double lambda = 0.0;

  Eigen::Index lp_variables() const { return 2 * n_feat + 2 + n_data; }

  /// LP objective vector, for objective-gap checks.
  Vector lp_cost() const {
    Vector c = Vector::Zero(lp_variables());
    c.head(2 * n_feat).setOnes();
    c.tail(n_data).setConstant(lambda);
    return c;
  }

  struct Classifier {
    Vector w;
    double d;
    Vector u;
  };

  /// Decode a transformed-system point x = (z_lp, nu) back to (w, d, u).
  Classifier decode(const Vector& x) const {
    if (x.size() < lp_variables())
      throw std::invalid_argument("SvmLpModel::decode: point too short");
    Classifier cls;
    cls.w = x.head(n_feat) - x.segment(n_feat, n_feat);
    cls.d = x[2 * n_feat] - x[2 * n_feat + 1];
    cls.u = x.segment(2 * n_feat + 2, n_data);
    return cls;
  }

  /// Positive/negative-part encoding of (w, d, u) into LP variables.
  Vector encode(const Vector& w, double d, const Vector& u) const {
    Vector z = Vector::Zero(lp_variables());
    z.head(n_feat) = w.cwiseMax(0.0);
    z.segment(n_feat, n_feat) = (-w).cwiseMax(0.0);
    z[2 * n_feat] = std::max(d, 0.0);
    z[2 * n_feat + 1] = std::max(-d, 0.0);
    z.segment(2 * n_feat + 2, n_data) = u;
    return z;
  }
};

inline SvmLpModel build_sparse_svm_lp(const LabeledDataset& data,
                                      double lambda) {
  data.validate();
  if (data.size() == 0)
    throw std::invalid_argument("build_sparse_svm_lp: empty dataset");
  if (lambda <= 0.0)
    throw std::invalid_argument("build_sparse_svm_lp: lambda <= 0");

  const Eigen::Index n = data.num_features();
  const Eigen::Index N = data.size();
  const Eigen::Index vars = 2 * n + 2 + N;

  // margin constraints: y_i (w'z_i + d) >= 1 - u_i rewritten as
  // -y_i z_i' w_plus + y_i z_i' w_minus - y_i d_plus + y_i d_minus - u_i <= -1
  RowMatrix C_lp(N, vars);
  std::vector<Eigen::Triplet<double>> trips;
  for (Eigen::Index i = 0; i < N; ++i) {
    const double y = data.labels[i];
    for (RowMatrix::InnerIterator it(data.features, i); it; ++it) {
      trips.emplace_back(i, it.col(), -y * it.value());
      trips.emplace_back(i, n + it.col(), y * it.value());
    }
    trips.emplace_back(i, 2 * n, -y);
    trips.emplace_back(i, 2 * n + 1, y);
    trips.emplace_back(i, 2 * n + 2 + i, -1.0);
  }
  C_lp.setFromTriplets(trips.begin(), trips.end());
  const Vector d_lp = Vector::Constant(N, -1.0);

  SvmLpModel model;
  model.n_feat = n;
  model.n_data = N;
  model.lambda = lambda;
  model.problem = build_lp_feasibility(
      [&] {
        Vector c = Vector::Zero(vars);
        c.head(2 * n).setOnes();
        c.tail(N).setConstant(lambda);
        return c;
      }(),
      C_lp, d_lp);
  return model;
}

/// Robust sparse SVM over x = (w[n], d, u[N]):
///   min lambda*sum(u) + ||w||_1
///   s.t. margin and cone constraints per datum, u >= 0 (via Y).
/// f carries the linear lambda*sum(u) term, g carries ||w||_1 (prox =
/// soft thresholding on the w coordinates). With rho = 0 the cone rows
/// collapse onto the margin rows, so only the N linear constraints are
/// emitted (the nominal classifier).
struct RobustSvmModel {
  CompositeProblem problem;
  Eigen::Index n_feat = 0;
  Eigen::Index n_data = 0;
  double lambda = 0.0;
  EllipsoidModel ellipsoids;

  Vector weights(const Vector& x) const { return x.head(n_feat); }
  double offset(const Vector& x) const { return x[n_feat]; }
  Vector slacks(const Vector& x) const { return x.tail(n_data); }
};

inline RobustSvmModel build_robust_svm(const LabeledDataset& data,
                                       double lambda,
                                       const EllipsoidModel& ellipsoids) {
  data.validate();
  if (lambda <= 0.0)
    throw std::invalid_argument("build_robust_svm: lambda <= 0");

  const Eigen::Index n = data.num_features();
  const Eigen::Index N = data.size();
  const Eigen::Index dim = n + 1 + N;
  const bool robust = ellipsoids.rho > 0.0;

  auto shared = std::make_shared<LabeledDataset>(data);
  auto shapes = std::make_shared<std::vector<Vector>>();
  if (robust) {
    shapes->reserve(N);
    for (Eigen::Index i = 0; i < N; ++i)
      shapes->push_back(ellipsoids.shape_diag(data.labels[i]));
  }

  RobustSvmModel model;
  model.n_feat = n;
  model.n_data = N;
  model.lambda = lambda;
  model.ellipsoids = ellipsoids;

  CompositeProblem& prob = model.problem;
  prob.dimension = dim;
  prob.objective_dist = Categorical::uniform(1);
  prob.constraint_dist = Categorical::uniform(robust ? 2 * N : N);

  prob.objective_subgrad = [N, lambda](std::size_t, const Vector& x) {
    Vector g = Vector::Zero(x.size());
    g.tail(N).setConstant(lambda);
    return g;
  };
  prob.objective_prox = [n](std::size_t, double alpha, const Vector& x) {
    Vector out = x;
    out.head(n) = soft_threshold(x.head(n), alpha, 1.0);
    return out;
  };
  prob.objective_value = [n, N, lambda](std::size_t, const Vector& x) {
    return lambda * x.tail(N).sum() + x.head(n).lpNorm<1>();
  };

  auto margin = [shared, n](Eigen::Index i, const Vector& x) {
    const Vector z = shared->feature_row(i);
    const double y = shared->labels[i];
    return 1.0 - x[n + 1 + i] - y * (x.head(n).dot(z) + x[n]);
  };

  prob.constraint_value = [shared, shapes, margin, n, N, robust](
                              std::size_t xi, const Vector& x) {
    const Eigen::Index i = static_cast<Eigen::Index>(xi % std::size_t(N));
    const double lin = margin(i, x);
    if (!robust || xi < std::size_t(N)) return lin;
    const Vector& q = (*shapes)[i];
    const double norm_q =
        std::sqrt((x.head(n).array().square() / q.array()).sum());
    return lin + norm_q;
  };
  prob.constraint_subgrad = [shared, shapes, n, N, robust](std::size_t xi,
                                                           const Vector& x) {
    const Eigen::Index i = static_cast<Eigen::Index>(xi % std::size_t(N));
    const double y = shared->labels[i];
    Vector g = Vector::Zero(x.size());
    g.head(n) = -y * shared->feature_row(i);
    g[n] = -y;
    g[n + 1 + i] = -1.0;
    if (robust && xi >= std::size_t(N)) {
      const SocEval soc =
          soc_eval_subgrad(x.head(n), x[n], x[n + 1 + i],
                           shared->feature_row(i), y, (*shapes)[i]);
      g.head(n) = soc.grad_w;
    }
    return g;
  };

  std::vector<Eigen::Index> u_indices(N);
  for (Eigen::Index i = 0; i < N; ++i) u_indices[i] = n + 1 + i;
  prob.simple_set = SimpleSet::coordinate_nonnegative(std::move(u_indices));

  // valid subgradient bound: ||z_i|| plus the cone-term bound, plus the
  // unit entries on the d and u coordinates
  double zmax = 0.0;
  for (Eigen::Index i = 0; i < N; ++i)
    zmax = std::max(zmax, data.feature_row(i).norm());
  double cone = 0.0;
  if (robust)
    for (const Vector& q : *shapes)
      cone = std::max(cone, std::sqrt(1.0 / q.minCoeff()));
  prob.constants.B_h = std::sqrt((zmax + cone) * (zmax + cone) + 2.0);
  prob.constants.L = 0.0;  // nonsmooth pieces, bounded subgradients
  prob.constants.B = std::sqrt(2.0) * std::max(1.0, lambda * std::sqrt(double(N)));

  return model;
}

/// Closest point of the ellipsoid around z_i to the wrong side of the
/// hyperplane, and the attained minimal margin
/// y_i (w'zbar + d) = y_i (w'z_i + d) - ||Q^{-1/2} w||.
struct WorstCasePoint {
  Vector point;
  double margin;
  bool degenerate = false;  ///< w = 0: no unique minimizer
};

inline WorstCasePoint worst_case_point(const Vector& w, double d,
                                       const Vector& z_i, double y_i,
                                       const Vector& q_diag) {
  if ((q_diag.array() <= 0.0).any())
    throw std::invalid_argument("worst_case_point: Q must be positive diagonal");
  WorstCasePoint out;
  const double wqw = (w.array().square() / q_diag.array()).sum();
  if (wqw <= 0.0) {
    out.point = z_i;
    out.margin = y_i * d;
    out.degenerate = true;
    return out;
  }
  const Vector qinv_w = (w.array() / q_diag.array()).matrix();
  out.point = z_i - (y_i / std::sqrt(wqw)) * qinv_w;
  out.margin = y_i * (w.dot(z_i) + d) - std::sqrt(wqw);
  return out;
}

enum class ClassifyRule { Ordinary, WorstCase };

struct Classification {
  double label = 1.0;
  bool on_boundary = false;   ///< w'z + d == 0, labelled +1 by tie-break
  bool wc_intersects = false; ///< worst-case rule flagged the point
};

/// Ordinary rule: sign of w'z + d. Worst-case rule additionally flags a
/// point whose uncertainty ellipsoid crosses the hyperplane, using the
/// squared-norm test |w'z + d| < ||Q^{-1/2} w||^2 as printed in the source
/// formulation; set `squared_test = false` for the unsquared variant.
inline Classification classify(ClassifyRule rule, const Vector& w, double d,
                               const Vector& z, const Vector* q_diag = nullptr,
                               bool squared_test = true) {
  Classification c;
  const double score = w.dot(z) + d;
  if (score > 0.0)
    c.label = 1.0;
  else if (score < 0.0)
    c.label = -1.0;
  else {
    c.label = 1.0;
    c.on_boundary = true;
  }
  if (rule == ClassifyRule::WorstCase) {
    if (q_diag == nullptr)
      throw std::invalid_argument("classify: worst-case rule needs Q");
    const double norm_q =
        std::sqrt((w.array().square() / q_diag->array()).sum());
    const double threshold = squared_test ? norm_q * norm_q : norm_q;
    c.wc_intersects = std::abs(score) < threshold;
  }
  return c;
}

}  // namespace ssp
