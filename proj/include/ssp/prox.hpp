#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

#include "ssp/simple_set.hpp"

namespace ssp {

/// prox of weight*gamma*||.||_1: componentwise shrinkage toward zero.
/// Tie-breaking at the kink is deterministic (sign(0) = 0).
inline Vector soft_threshold(const Vector& x, double gamma, double weight) {
  if (gamma <= 0.0) throw std::invalid_argument("soft_threshold: gamma <= 0");
  const double t = gamma * weight;
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] > t)
      out[i] = x[i] - t;
    else if (x[i] < -t)
      out[i] = x[i] + t;
    else
      out[i] = 0.0;
  }
  return out;
}

/// Polyak feasibility step: v - beta * (h)_+ / ||grad||^2 * grad, with the
/// convention 0/0 = 0 (identity when the constraint already holds). For
/// beta = 1 and affine h this lands exactly on the violated hyperplane.
inline Vector polyak_step(const Vector& v, double h_plus, const Vector& grad_h,
                          double beta) {
  if (h_plus <= 0.0) return v;
  const double g2 = grad_h.squaredNorm();
  if (g2 == 0.0)
    throw std::invalid_argument(
        "polyak_step: violated constraint with zero subgradient");
  if (g2 < 1e-300) return v;  // degenerate oracle, skip the move
  return v - (beta * h_plus / g2) * grad_h;
}

/// Value and subgradient of the second order cone constraint
///   h(w,d,u_i) = ||Q^{-1/2} w|| + 1 - u_i - y_i (w'z_i + d)
/// over the stacked variable (w, d, u_i). Q is diagonal with strictly
/// positive entries. At w = 0 the norm term contributes the zero
/// subgradient (a valid element, and it keeps ||grad h|| bounded).
struct SocEval {
  double value;
  Vector grad_w;
  double grad_d;
  double grad_u;
};

inline SocEval soc_eval_subgrad(const Vector& w, double d, double u_i,
                                const Vector& z_i, double y_i,
                                const Vector& q_diag) {
  if (w.size() != z_i.size() || w.size() != q_diag.size())
    throw std::invalid_argument("soc_eval_subgrad: dimension mismatch");
  if ((q_diag.array() <= 0.0).any())
    throw std::invalid_argument("soc_eval_subgrad: Q must be positive diagonal");

  // ||Q^{-1/2} w|| = sqrt(sum w_j^2 / q_j)
  const double norm_q = std::sqrt((w.array().square() / q_diag.array()).sum());

  SocEval e;
  e.value = norm_q + 1.0 - u_i - y_i * (w.dot(z_i) + d);
  if (norm_q > 0.0)
    e.grad_w = (w.array() / q_diag.array()).matrix() / norm_q - y_i * z_i;
  else
    e.grad_w = -y_i * z_i;
  e.grad_d = -y_i;
  e.grad_u = -1.0;
  return e;
}

}  // namespace ssp
