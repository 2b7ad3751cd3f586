#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ssp {

/// Largest alpha with 0 < alpha <= alpha(2 - alpha L) < 1. Any constant or
/// decaying stepsize strictly below this bound is admissible for the convex
/// analysis.
inline double stepsize_upper_bound_convex(double L) {
  if (L < 0.0) throw std::invalid_argument("stepsize bound: L < 0");
  if (L == 0.0) return 0.5;
  const double r = std::max(1.0 - L, 0.0);
  return (1.0 - std::sqrt(r)) / L;
}

/// Switching schedule for strongly convex objectives:
/// alpha_k = min(1/L, 8 / (mu (k+1))), with 1/L = infinity when L = 0.
/// Constant until k0 = ceil(8L/mu), decaying afterwards.
inline double stepsize_switching(long k, double L, double mu) {
  if (mu <= 0.0) throw std::invalid_argument("stepsize_switching: mu <= 0");
  const double decay = 8.0 / (mu * static_cast<double>(k + 1));
  if (L == 0.0) return decay;
  return std::min(1.0 / L, decay);
}

/// Iteration index where the switching schedule leaves its constant phase.
inline long switching_k0(double L, double mu) {
  if (mu <= 0.0) throw std::invalid_argument("switching_k0: mu <= 0");
  return static_cast<long>(std::ceil(8.0 * L / mu));
}

/// Stepsize schedule selector.
struct StepsizePolicy {
  enum class Kind { PolynomialDecay, SwitchingStronglyConvex, Constant };

  Kind kind = Kind::PolynomialDecay;
  double alpha0 = 0.0;  ///< PolynomialDecay / Constant base value
  double gamma = 0.5;   ///< PolynomialDecay exponent, in [0,1)
  double L = 0.0;
  double mu = 0.0;  ///< SwitchingStronglyConvex modulus

  static StepsizePolicy polynomial_decay(double alpha0, double gamma,
                                         double L = 0.0) {
    if (gamma < 0.0 || gamma >= 1.0)
      throw std::invalid_argument("polynomial decay: gamma outside [0,1)");
    if (alpha0 <= 0.0 || alpha0 >= stepsize_upper_bound_convex(L))
      throw std::invalid_argument(
          "polynomial decay: alpha0 outside the admissible interval");
    StepsizePolicy p;
    p.kind = Kind::PolynomialDecay;
    p.alpha0 = alpha0;
    p.gamma = gamma;
    p.L = L;
    return p;
  }

  static StepsizePolicy switching(double L, double mu) {
    if (mu <= 0.0) throw std::invalid_argument("switching policy: mu <= 0");
    StepsizePolicy p;
    p.kind = Kind::SwitchingStronglyConvex;
    p.L = L;
    p.mu = mu;
    return p;
  }

  static StepsizePolicy constant(double alpha, double L = 0.0, double mu = 0.0) {
    if (alpha <= 0.0) throw std::invalid_argument("constant policy: alpha <= 0");
    StepsizePolicy p;
    p.kind = Kind::Constant;
    p.alpha0 = alpha;
    p.L = L;
    p.mu = mu;
    return p;
  }

  double alpha(long k) const {
    switch (kind) {
      case Kind::PolynomialDecay:
        return alpha0 / std::pow(static_cast<double>(k + 1), gamma);
      case Kind::SwitchingStronglyConvex:
        return stepsize_switching(k, L, mu);
      case Kind::Constant:
        return alpha0;
    }
    throw std::logic_error("StepsizePolicy: unknown kind");
  }
};

}  // namespace ssp
