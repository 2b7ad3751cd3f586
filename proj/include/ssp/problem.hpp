#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ssp/linalg.hpp"
#include "ssp/random.hpp"
#include "ssp/simple_set.hpp"

namespace ssp {

/// Constants of the gradient-growth / convexity / constraint-bound
/// assumptions. They feed stepsize policies and diagnostics; a solver never
/// fails because a constant is loose, it just converges per the looser value.
struct AssumptionConstants {
  double L = 0.0;    ///< bounded-gradient growth factor
  double B = 0.0;    ///< bounded-gradient offset
  double mu = 0.0;   ///< strong-convexity modulus
  double B_h = 1.0;  ///< constraint subgradient bound
  std::optional<double> c;  ///< regularity constant, diagnostics only

  void validate() const {
    if (L < 0.0 || B < 0.0 || mu < 0.0)
      throw std::invalid_argument("AssumptionConstants: negative constant");
    if (B_h <= 0.0) throw std::invalid_argument("AssumptionConstants: B_h <= 0");
    if (c && *c * B_h * B_h <= 1.0)
      throw std::invalid_argument("AssumptionConstants: need c*B_h^2 > 1");
  }
};

/// Oracle bundle for min E[f(x,zeta) + g(x,zeta)] over the simple set Y
/// subject to h(x,xi) <= 0 for all xi. Index sets are finite categorical;
/// the oracles are closures over the sampled index. Immutable after
/// construction and safe to share read-only across runs.
struct CompositeProblem {
  Eigen::Index dimension = 0;

  Categorical objective_dist;   ///< P1 over the objective indices
  Categorical constraint_dist;  ///< P2 over the constraint indices

  /// (sub)gradient of f(.,zeta) at x
  std::function<Vector(std::size_t zeta, const Vector& x)> objective_subgrad;
  /// prox of alpha * g(.,zeta) at x
  std::function<Vector(std::size_t zeta, double alpha, const Vector& x)>
      objective_prox;
  /// optional value f(x,zeta) + g(x,zeta), used for traces and stopping
  std::function<double(std::size_t zeta, const Vector& x)> objective_value;

  /// h(x,xi)
  std::function<double(std::size_t xi, const Vector& x)> constraint_value;
  /// one subgradient of h(.,xi) at x
  std::function<Vector(std::size_t xi, const Vector& x)> constraint_subgrad;

  SimpleSet simple_set = SimpleSet::whole_space();
  AssumptionConstants constants;

  /// known optimum, for traces and tests only
  std::optional<double> optimum_value;
  std::optional<Vector> optimum_point;

  std::size_t num_objective_terms() const { return objective_dist.size(); }
  std::size_t num_constraints() const { return constraint_dist.size(); }

  void validate() const {
    if (dimension <= 0)
      throw std::invalid_argument("CompositeProblem: dimension must be positive");
    if (objective_dist.size() == 0)
      throw std::invalid_argument("CompositeProblem: empty objective index set");
    if (!objective_subgrad || !objective_prox)
      throw std::invalid_argument("CompositeProblem: missing objective oracle");
    constants.validate();
  }
};

/// One draw from P1 with the oracles bound to the drawn index.
struct ObjectiveSample {
  std::size_t index;
  std::function<Vector(const Vector&)> subgrad;
  std::function<Vector(double alpha, const Vector&)> prox;
  std::function<double(const Vector&)> value;  // may be empty
};

/// One draw from P2.
struct ConstraintSample {
  std::size_t index;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> subgrad;
};

inline ObjectiveSample sample_objective(const CompositeProblem& problem,
                                        RandomStream& stream) {
  const std::size_t zeta = problem.objective_dist.sample(stream);
  ObjectiveSample s;
  s.index = zeta;
  s.subgrad = [&problem, zeta](const Vector& x) {
    return problem.objective_subgrad(zeta, x);
  };
  s.prox = [&problem, zeta](double alpha, const Vector& x) {
    return problem.objective_prox(zeta, alpha, x);
  };
  if (problem.objective_value)
    s.value = [&problem, zeta](const Vector& x) {
      return problem.objective_value(zeta, x);
    };
  return s;
}

inline ConstraintSample sample_constraint(const CompositeProblem& problem,
                                          RandomStream& stream) {
  if (problem.constraint_dist.size() == 0)
    throw std::invalid_argument("sample_constraint: empty constraint set");
  const std::size_t xi = problem.constraint_dist.sample(stream);
  ConstraintSample s;
  s.index = xi;
  s.value = [&problem, xi](const Vector& x) {
    return problem.constraint_value(xi, x);
  };
  s.subgrad = [&problem, xi](const Vector& x) {
    return problem.constraint_subgrad(xi, x);
  };
  return s;
}

/// For the least-squares objective 1/2 E||A_zeta' x - b_zeta||^2 the
/// bounded-gradient condition holds with B = 0 and L = 2 max ||A_zeta||^2.
inline AssumptionConstants estimate_ls_constants(
    const std::vector<Eigen::MatrixXd>& blocks_A) {
  if (blocks_A.empty())
    throw std::invalid_argument("estimate_ls_constants: no blocks");
  double max_sq = 0.0;
  for (const auto& block : blocks_A) {
    const double s = spectral_norm(block);
    max_sq = std::max(max_sq, s * s);
  }
  AssumptionConstants k;
  k.L = 2.0 * max_sq;
  k.B = 0.0;
  return k;
}

}  // namespace ssp
