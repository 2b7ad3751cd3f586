// The baselines themselves get sanity tests so that failures elsewhere can
// be trusted to implicate the library rather than the test harness.
#include <doctest.h>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "ssp/random.hpp"

using ssp::RandomStream;
using ssp::Vector;

TEST_CASE("cyclic projections solve a two-halfspace interval") {
  Eigen::MatrixXd C(2, 1);
  C << -1.0, 1.0;  // x >= 1, x <= 3
  Vector d(2);
  d << -1.0, 3.0;
  const auto prob = ssp::LinearFeasibilityProblem::create_dense(
      Eigen::MatrixXd(0, 1), Vector(), C, d);
  const Vector x =
      oracle::feasibility_cyclic(prob, 1e-9, Vector::Zero(1));
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("cyclic projections reach a planted system's tolerance") {
  RandomStream s(81);
  Eigen::MatrixXd A(6, 4);
  Vector x_dag(4);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 4; ++j) A(i, j) = s.normal();
  for (int j = 0; j < 4; ++j) x_dag[j] = s.normal();
  const auto prob = ssp::LinearFeasibilityProblem::create_dense(
      A, A * x_dag, Eigen::MatrixXd(0, 4), Vector());
  const Vector x = oracle::feasibility_cyclic(prob, 1e-6, Vector::Zero(4));
  CHECK((Eigen::MatrixXd(prob.A) * x - prob.b).norm() <= 1e-6);
}

TEST_CASE("no constraints leaves only the simple-set projection") {
  const auto prob = ssp::LinearFeasibilityProblem::create(
      ssp::RowMatrix(0, 2), Vector(), ssp::RowMatrix(0, 2), Vector(),
      ssp::SimpleSet::nonnegative_orthant());
  Vector x0(2);
  x0 << -1.0, 2.0;
  const Vector x = oracle::feasibility_cyclic(prob, 1e-9, x0);
  CHECK(x[0] == 0.0);
  CHECK(x[1] == 2.0);
}

TEST_CASE("vertex enumeration solves textbook programs") {
  SUBCASE("min z subject to z >= 1") {
    Eigen::MatrixXd C(1, 1);
    C << -1.0;
    Vector c(1), d(1);
    c << 1.0;
    d << -1.0;
    const auto lp = oracle::small_lp(c, C, d);
    REQUIRE(lp.status == oracle::LpStatus::Optimal);
    CHECK(lp.value == doctest::Approx(1.0));
    CHECK(lp.point[0] == doctest::Approx(1.0));
  }
  SUBCASE("min x + y over the unit box") {
    Eigen::MatrixXd C = Eigen::MatrixXd::Identity(2, 2);
    Vector c(2), d(2);
    c << 1.0, 1.0;
    d << 1.0, 1.0;
    const auto lp = oracle::small_lp(c, C, d);
    REQUIRE(lp.status == oracle::LpStatus::Optimal);
    CHECK(lp.value == doctest::Approx(0.0));
  }
  SUBCASE("contradictory bounds are infeasible") {
    Eigen::MatrixXd C(1, 1);
    C << 1.0;  // z <= -1 with z >= 0
    Vector c(1), d(1);
    c << 1.0;
    d << -1.0;
    CHECK(oracle::small_lp(c, C, d).status == oracle::LpStatus::Infeasible);
  }
  SUBCASE("a free descent direction is reported unbounded") {
    Eigen::MatrixXd C(1, 2);
    C << 1.0, 0.0;  // x <= 1, y free above 0, minimize -y
    Vector c(2), d(1);
    c << 0.0, -1.0;
    d << 1.0;
    CHECK(oracle::small_lp(c, C, d).status == oracle::LpStatus::Unbounded);
  }
}

TEST_CASE("vertex optimum is confirmed by a dense grid") {
  RandomStream s(82);
  Eigen::MatrixXd C(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) C(i, j) = s.normal();
  Vector z0(3), c(3), d(3 + 3);
  for (int j = 0; j < 3; ++j) {
    z0[j] = s.uniform();
    c[j] = s.normal();
  }
  Eigen::MatrixXd Cb(6, 3);
  Cb.topRows(3) = C;
  Cb.bottomRows(3) = Eigen::MatrixXd::Identity(3, 3);
  d.head(3) = C * z0 + Vector::Constant(3, 0.3);
  d.tail(3) = Vector::Constant(3, 2.0);

  const auto lp = oracle::small_lp(c, Cb, d);
  REQUIRE(lp.status == oracle::LpStatus::Optimal);

  // 100^3 grid over the [0,2] box; grid best can undercut the true optimum
  // only by the grid's resolution error
  double grid_best = std::numeric_limits<double>::infinity();
  const int steps = 100;
  Vector z(3);
  for (int a = 0; a <= steps; ++a)
    for (int b = 0; b <= steps; ++b)
      for (int g = 0; g <= steps; ++g) {
        z << 2.0 * a / steps, 2.0 * b / steps, 2.0 * g / steps;
        if (((Cb * z - d).array() <= 1e-12).all())
          grid_best = std::min(grid_best, c.dot(z));
      }
  CHECK(lp.value <= grid_best + 1e-9);
  CHECK(grid_best <= lp.value + 0.2);  // grid resolution slack
}

TEST_CASE("sampled ellipsoid minimum approaches the unit-circle value") {
  Vector w(2), z(2), q(2);
  w << 1.0, 0.0;
  z << 0.0, 0.0;
  q << 1.0, 1.0;
  const double min_margin = oracle::ellipsoid_min(w, 0.0, z, 1.0, q, 100000, 7);
  CHECK(min_margin == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("zero weights make the sampled margin constant") {
  Vector w = Vector::Zero(2), z(2), q(2);
  z << 5.0, -2.0;
  q << 2.0, 0.5;
  CHECK(oracle::ellipsoid_min(w, 0.7, z, 1.0, q, 10000, 3) ==
        doctest::Approx(0.7));
}

TEST_CASE("finite differences recover a smooth gradient") {
  RandomStream s(83);
  Vector x(4);
  for (int j = 0; j < 4; ++j) x[j] = s.normal();
  const double dev = oracle::finite_diff_subgradient_check(
      [](const Vector& p) { return 0.5 * p.squaredNorm(); }, x, 1e-5, x);
  CHECK(dev <= 1e-6);
}

TEST_CASE("finite differences recover the l1 sign away from zero") {
  Vector x(3);
  x << 0.7, -1.2, 0.4;
  Vector sign(3);
  sign << 1.0, -1.0, 1.0;
  const double dev = oracle::finite_diff_subgradient_check(
      [](const Vector& p) { return p.lpNorm<1>(); }, x, 1e-5, sign);
  CHECK(dev <= 1e-6);
}

TEST_CASE("line fit recovers an exact affine relation") {
  std::vector<double> xs, ys;
  for (int k = 0; k < 30; ++k) {
    xs.push_back(k);
    ys.push_back(3.0 - 0.25 * k);
  }
  const auto fit = oracle::fit_line(xs, ys);
  CHECK(fit.slope == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
}
