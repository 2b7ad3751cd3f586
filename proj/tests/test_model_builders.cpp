#include <doctest.h>

#include <Eigen/Dense>
#include <vector>

#include "oracles.hpp"
#include "ssp/model_builders.hpp"
#include "ssp/ssp_ls.hpp"

using ssp::EllipsoidModel;
using ssp::LabeledDataset;
using ssp::RandomStream;
using ssp::Vector;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

LabeledDataset dense_dataset(const Eigen::MatrixXd& features,
                             const Vector& labels) {
  LabeledDataset data;
  data.features = features.sparseView();
  data.labels = labels;
  return data;
}

}  // namespace

TEST_CASE("class-independent covariances share one diagonal value") {
  Eigen::MatrixXd f(4, 2);
  f << 1.0, 5.0, 3.0, 9.0, -1.0, 2.0, 0.0, 4.0;
  Vector y(4);
  y << 1.0, 1.0, -1.0, -1.0;
  const auto model = ssp::covariance_from_data(
      dense_dataset(f, y), EllipsoidModel::Mode::ClassIndependent, 0.5);
  CHECK(model.cov_plus.minCoeff() == model.cov_plus.maxCoeff());
  CHECK(model.cov_plus == model.cov_minus);
}

TEST_CASE("class-dependent covariances match a two-pass variance oracle") {
  RandomStream s(61);
  Eigen::MatrixXd f(20, 3);
  Vector y(20);
  for (int i = 0; i < 20; ++i) {
    y[i] = i % 2 == 0 ? 1.0 : -1.0;
    for (int j = 0; j < 3; ++j) f(i, j) = 2.0 * s.normal();
  }
  const auto model = ssp::covariance_from_data(
      dense_dataset(f, y), EllipsoidModel::Mode::ClassDependent, 0.3);

  for (double label : {1.0, -1.0}) {
    std::vector<int> members;
    for (int i = 0; i < 20; ++i)
      if (y[i] == label) members.push_back(i);
    for (int j = 0; j < 3; ++j) {
      double mean = 0.0;
      for (int i : members) mean += f(i, j);
      mean /= static_cast<double>(members.size());
      double var = 0.0;
      for (int i : members) var += (f(i, j) - mean) * (f(i, j) - mean);
      var /= static_cast<double>(members.size());
      CHECK(model.covariance(label)[j] == doctest::Approx(var).epsilon(1e-12));
    }
  }
}

TEST_CASE("degenerate covariance inputs are flagged") {
  Eigen::MatrixXd f(2, 2);
  f << 1.0, 1.0, 1.0, 1.0;
  Vector y(2);
  y << 1.0, -1.0;
  const auto zero_var = ssp::covariance_from_data(
      dense_dataset(f, y), EllipsoidModel::Mode::ClassDependent, 0.5);
  CHECK(zero_var.cov_plus == Vector::Zero(2));
  CHECK_THROWS_AS(zero_var.shape_diag(1.0), std::invalid_argument);

  Vector single(2);
  single << 1.0, 1.0;
  CHECK_THROWS_AS(
      ssp::covariance_from_data(dense_dataset(f, single),
                                EllipsoidModel::Mode::ClassDependent, 0.5),
      std::invalid_argument);
  CHECK_THROWS_AS(
      ssp::covariance_from_data(dense_dataset(f, y),
                                EllipsoidModel::Mode::ClassDependent, 1.5),
      std::invalid_argument);
}

TEST_CASE("primal-dual feasibility system has the documented shapes") {
  RandomStream s(62);
  const Eigen::Index n = 3, p = 2;
  Eigen::MatrixXd C(p, n);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < n; ++j) C(i, j) = s.normal();
  Vector c(n), d(p);
  c << 1.0, 2.0, 3.0;
  d << 4.0, 5.0;
  const auto prob = ssp::build_lp_feasibility(c, C.sparseView(), d);
  CHECK(prob.dimension() == n + p);
  CHECK(prob.num_eq_rows() == 1);
  CHECK(prob.num_ineq_rows() == p + n);
  CHECK(prob.Y.kind() == ssp::SimpleSet::Kind::NonnegativeOrthant);
}

TEST_CASE("a known primal-dual pair satisfies the transformed system") {
  // min z s.t. -z <= -1, z >= 0: optimum z = 1 with multiplier 1
  Eigen::MatrixXd C(1, 1);
  C << -1.0;
  Vector c(1), d(1);
  c << 1.0;
  d << -1.0;
  const auto prob = ssp::build_lp_feasibility(c, C.sparseView(), d);
  Vector x(2);
  x << 1.0, 1.0;  // (z, nu)
  CHECK(prob.eq_residual(x) <= 1e-15);
  CHECK(prob.ineq_residual(x) <= 1e-15);
}

TEST_CASE("solving the transformed system recovers small LP optima") {
  // instances built backward from a chosen vertex: three Gaussian rows are
  // active with multipliers in [0.5, 1.5], so the optimum is nondegenerate
  // and strictly complementary; ill-conditioned active blocks are redrawn
  // because the combined primal-dual polytope gets arbitrarily thin there
  RandomStream s(63);
  for (int trial = 0; trial < 3; ++trial) {
    const Eigen::Index n = 3;
    Eigen::MatrixXd C(4 + n, n);
    Vector zs(n), lam(3);
    double cond = 1e300;
    while (cond > 30.0) {
      for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < n; ++j) C(i, j) = s.normal();
      const auto sv = C.topRows(3).jacobiSvd().singularValues();
      cond = sv(0) / sv(2);
    }
    C.bottomRows(n) = Eigen::MatrixXd::Identity(n, n);  // box keeps it bounded
    for (Eigen::Index j = 0; j < n; ++j) zs[j] = 0.5 + 2.0 * s.uniform();
    for (int i = 0; i < 3; ++i) lam[i] = 0.5 + s.uniform();
    Vector d(4 + n);
    for (int i = 0; i < 3; ++i) d[i] = C.row(i).dot(zs);
    d[3] = C.row(3).dot(zs) + 0.5 + s.uniform();
    d.tail(n) = Vector::Constant(n, 5.0);
    const Vector c = -(C.topRows(3).transpose() * lam);

    const auto lp = oracle::small_lp(c, C, d);
    REQUIRE(lp.status == oracle::LpStatus::Optimal);
    REQUIRE(lp.value == doctest::Approx(c.dot(zs)).epsilon(1e-9));

    const auto prob = ssp::build_lp_feasibility(c, C.sparseView(), d);
    ssp::LsConfig cfg;
    cfg.delta = 1.0;
    cfg.beta = 1.0;
    cfg.tolerance = 1e-4;
    cfg.max_epochs = 100000;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const auto result = ssp_ls_run(prob, cfg);
    REQUIRE(result.report.termination == ssp::Termination::ToleranceMet);
    const double objective = c.dot(result.report.point.head(n));
    CHECK(std::abs(objective - lp.value) <= 1e-2);
  }
}

TEST_CASE("hinge-loss LP encoding round-trips and counts variables") {
  Eigen::MatrixXd f(4, 3);
  f << 1.0, 0.0, 2.0, 0.0, 1.0, -1.0, -1.0, 0.5, 0.0, 2.0, -2.0, 1.0;
  Vector y(4);
  y << 1.0, -1.0, -1.0, 1.0;
  const auto model = ssp::build_sparse_svm_lp(dense_dataset(f, y), 0.5);
  CHECK(model.lp_variables() == 2 * 3 + 2 + 4);
  CHECK(model.problem.dimension() == model.lp_variables() + 4);

  Vector w(3), u(4);
  w << 0.5, -1.0, 0.0;
  u << 0.0, 0.2, 0.0, 1.0;
  const Vector encoded = model.encode(w, -0.7, u);
  const auto decoded = model.decode(
      (Vector(model.problem.dimension()) << encoded,
       Vector::Zero(4)).finished());
  CHECK((decoded.w - w).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(decoded.d == -0.7);
  CHECK((decoded.u - u).lpNorm<Eigen::Infinity>() == 0.0);
  // re-encoding the decoded triple is idempotent
  CHECK(model.encode(decoded.w, decoded.d, decoded.u) == encoded);
}

TEST_CASE("separable one-dimensional data trains a correct classifier") {
  Eigen::MatrixXd f(2, 1);
  f << 1.0, -1.0;
  Vector y(2);
  y << 1.0, -1.0;
  const auto data = dense_dataset(f, y);
  const auto model = ssp::build_sparse_svm_lp(data, 1.0);
  ssp::LsConfig cfg;
  cfg.tolerance = 1e-4;
  cfg.max_epochs = 20000;
  const auto result = ssp_ls_run(model.problem, cfg);
  REQUIRE(result.report.termination == ssp::Termination::ToleranceMet);
  const auto cls = model.decode(result.report.point);
  for (int i = 0; i < 2; ++i) {
    const auto verdict = ssp::classify(ssp::ClassifyRule::Ordinary, cls.w,
                                       cls.d, data.feature_row(i));
    CHECK(verdict.label == y[i]);
  }
}

TEST_CASE("robust builder with rho=0 emits only the linear margin rows") {
  Eigen::MatrixXd f(2, 2);
  f << 2.0, 0.0, -2.0, 0.0;
  Vector y(2);
  y << 1.0, -1.0;
  EllipsoidModel nominal;
  nominal.cov_plus = Vector::Ones(2);
  nominal.cov_minus = Vector::Ones(2);
  nominal.rho = 0.0;
  const auto model = ssp::build_robust_svm(dense_dataset(f, y), 1.0, nominal);
  CHECK(model.problem.num_constraints() == 2);
}

TEST_CASE("robust builder cone rows agree with the direct cone evaluation") {
  Eigen::MatrixXd f(2, 2);
  f << 2.0, 0.0, -2.0, 0.0;
  Vector y(2);
  y << 1.0, -1.0;
  EllipsoidModel ell;
  ell.cov_plus = Vector::Ones(2);
  ell.cov_minus = Vector::Ones(2);
  ell.rho = 1.0;
  const auto model = ssp::build_robust_svm(dense_dataset(f, y), 1.0, ell);
  CHECK(model.problem.num_constraints() == 4);

  // x = (w, d, u): w=(1,0), d=0, u=0 at datum 0 gives an active cone row
  Vector x = Vector::Zero(5);
  x[0] = 1.0;
  CHECK(model.problem.constraint_value(2, x) ==
        doctest::Approx(0.0).epsilon(1e-15));
  // linear margin row at the same point: 1 - 2 = -1
  CHECK(model.problem.constraint_value(0, x) == doctest::Approx(-1.0));
}

TEST_CASE("cone rows dominate their linear counterparts everywhere") {
  RandomStream s(64);
  Eigen::MatrixXd f(3, 2);
  f << 1.0, 2.0, -0.5, 1.0, 0.3, -2.0;
  Vector y(3);
  y << 1.0, -1.0, 1.0;
  EllipsoidModel ell;
  ell.cov_plus = vec2(0.5, 2.0);
  ell.cov_minus = vec2(1.5, 0.25);
  ell.rho = 0.7;
  const auto model = ssp::build_robust_svm(dense_dataset(f, y), 0.5, ell);
  for (int t = 0; t < 200; ++t) {
    Vector x(6);
    for (int j = 0; j < 6; ++j) x[j] = 2.0 * s.normal();
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(model.problem.constraint_value(3 + i, x) >=
            model.problem.constraint_value(i, x) - 1e-14);
  }
}

TEST_CASE("declared constraint subgradient bound holds at random points") {
  RandomStream s(65);
  Eigen::MatrixXd f(4, 2);
  f << 1.0, 2.0, -0.5, 1.0, 0.3, -2.0, 2.0, 2.0;
  Vector y(4);
  y << 1.0, -1.0, 1.0, -1.0;
  EllipsoidModel ell;
  ell.cov_plus = vec2(0.5, 2.0);
  ell.cov_minus = vec2(1.5, 0.25);
  ell.rho = 0.7;
  const auto model = ssp::build_robust_svm(dense_dataset(f, y), 0.5, ell);
  const double B_h = model.problem.constants.B_h;
  for (int t = 0; t < 1000; ++t) {
    Vector x(7);
    for (int j = 0; j < 7; ++j) x[j] = 3.0 * s.normal();
    const std::size_t xi = static_cast<std::size_t>(s.uniform_index(8));
    CHECK(model.problem.constraint_subgrad(xi, x).norm() <= B_h + 1e-12);
  }
}

TEST_CASE("worst-case boundary point and its margin") {
  const auto wc = ssp::worst_case_point(vec2(1.0, 0.0), 0.0, vec2(0.0, 0.0),
                                        1.0, vec2(1.0, 1.0));
  CHECK(!wc.degenerate);
  CHECK((wc.point - vec2(-1.0, 0.0)).lpNorm<Eigen::Infinity>() <= 1e-15);
  CHECK(wc.margin == doctest::Approx(-1.0));

  // the returned margin is the margin of the returned point
  RandomStream s(66);
  for (int t = 0; t < 100; ++t) {
    Vector w(3), z(3), q(3);
    for (int j = 0; j < 3; ++j) {
      w[j] = s.normal();
      z[j] = 2.0 * s.normal();
      q[j] = 0.2 + 2.0 * s.uniform();
    }
    const double d = s.normal();
    const double y = s.uniform() < 0.5 ? -1.0 : 1.0;
    const auto r = ssp::worst_case_point(w, d, z, y, q);
    CHECK(r.margin ==
          doctest::Approx(y * (w.dot(r.point) + d)).epsilon(1e-12));
  }
}

TEST_CASE("zero weights make the worst case degenerate") {
  const auto wc = ssp::worst_case_point(vec2(0.0, 0.0), 0.5, vec2(3.0, 4.0),
                                        -1.0, vec2(1.0, 1.0));
  CHECK(wc.degenerate);
  CHECK(wc.point == vec2(3.0, 4.0));
  CHECK(wc.margin == doctest::Approx(-0.5));
}

TEST_CASE("classification rules on the worked examples") {
  const auto plus = ssp::classify(ssp::ClassifyRule::Ordinary, vec2(1.0, 0.0),
                                  -1.0, vec2(2.0, 0.0));
  CHECK(plus.label == 1.0);
  CHECK(!plus.on_boundary);

  const auto edge = ssp::classify(ssp::ClassifyRule::Ordinary, vec2(1.0, 0.0),
                                  -1.0, vec2(1.0, 0.0));
  CHECK(edge.label == 1.0);
  CHECK(edge.on_boundary);

  const Vector q = vec2(1.0, 1.0);
  const auto risky = ssp::classify(ssp::ClassifyRule::WorstCase,
                                   vec2(1.0, 0.0), 0.0, vec2(0.5, 0.0), &q);
  CHECK(risky.label == 1.0);
  CHECK(risky.wc_intersects);  // |0.5| < ||w||^2 = 1

  // unsquared variant compares against ||w|| instead
  const auto unsquared =
      ssp::classify(ssp::ClassifyRule::WorstCase, vec2(1.0, 0.0), 0.0,
                    vec2(0.5, 0.0), &q, false);
  CHECK(unsquared.wc_intersects);
  const auto safe = ssp::classify(ssp::ClassifyRule::WorstCase,
                                  vec2(1.0, 0.0), 0.0, vec2(1.5, 0.0), &q);
  CHECK(!safe.wc_intersects);
}

TEST_CASE("dataset validation rejects non-sign labels") {
  Eigen::MatrixXd f(1, 1);
  f << 1.0;
  Vector y(1);
  y << 0.5;
  CHECK_THROWS_AS(dense_dataset(f, y).validate(), std::invalid_argument);
}
