#pragma once

#include <Eigen/Core>
#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>

#include "ssp/linear_feasibility.hpp"
#include "ssp/trace.hpp"

namespace ssp {

struct LsConfig {
  double delta = 1.96;
  double beta = 1.96;
  double tolerance = 1e-3;  ///< on max(||Ax-b||, ||(Cx-d)+||)
  long max_epochs = 2000;
  std::uint64_t seed = 0;
  double max_seconds = std::numeric_limits<double>::infinity();
  std::optional<Vector> x0;

  void validate() const {
    if (delta <= 0.0 || delta >= 2.0)
      throw std::invalid_argument("LsConfig: delta must lie in (0,2)");
    if (beta <= 0.0 || beta >= 2.0)
      throw std::invalid_argument("LsConfig: beta must lie in (0,2)");
    if (max_epochs < 0) throw std::invalid_argument("LsConfig: max_epochs < 0");
  }
};

/// Adaptive stepsize delta ||r||^2 / ||w||^2 for the sampled equality
/// block, with r = A_blk x - b_blk and w = A_blk' r. Conventions:
/// r = 0 gives stepsize 0; r != 0 with w = 0 means the block equations are
/// inconsistent.
inline double adaptive_stepsize_ls(const Vector& r, const Vector& w,
                                   double delta) {
  const double r2 = r.squaredNorm();
  if (r2 == 0.0) return 0.0;
  const double w2 = w.squaredNorm();
  if (w2 == 0.0)
    throw std::runtime_error(
        "adaptive_stepsize_ls: inconsistent equality block (nonzero residual "
        "in the null space)");
  return delta * r2 / w2;
}

struct LsState {
  long k = 0;  ///< individual iteration counter
  Vector x;
};

/// One iteration of the linear feasibility solver: adaptive Kaczmarz-style
/// step on a sampled equality block, relaxed projection onto a sampled
/// inequality halfspace, projection onto Y. Draw order: equality block
/// first, then inequality row; absent parts consume no draws.
inline void ssp_ls_step(LsState& state, const LinearFeasibilityProblem& prob,
                        const LsConfig& config, RandomStream& stream) {
  Vector v = state.x;
  if (prob.eq_blocks.count() > 0) {
    const std::size_t zeta = prob.eq_dist.sample(stream);
    const auto block =
        prob.A.middleRows(prob.eq_blocks.begin(zeta), prob.eq_blocks.size(zeta));
    const Vector r =
        block * state.x -
        prob.b.segment(prob.eq_blocks.begin(zeta), prob.eq_blocks.size(zeta));
    const Vector w = block.transpose() * r;
    const double alpha = adaptive_stepsize_ls(r, w, config.delta);
    if (alpha > 0.0) v -= alpha * w;
  }

  Vector z = v;
  if (prob.num_ineq_rows() > 0) {
    const std::size_t xi = prob.ineq_dist.sample(stream);
    const Eigen::Index row = static_cast<Eigen::Index>(xi);
    double dot = 0.0, n2 = 0.0;
    for (RowMatrix::InnerIterator it(prob.C, row); it; ++it) {
      dot += it.value() * v[it.col()];
      n2 += it.value() * it.value();
    }
    const double viol = dot - prob.d[row];
    if (viol > 0.0) {
      if (n2 == 0.0)
        throw std::runtime_error("ssp_ls_step: violated zero inequality row");
      const double coef = config.beta * viol / n2;
      for (RowMatrix::InnerIterator it(prob.C, row); it; ++it)
        z[it.col()] -= coef * it.value();
    }
  }

  state.x = prob.Y.project(z);
  if (!state.x.allFinite())
    throw std::runtime_error("ssp_ls_step: iterate is not finite at k=" +
                             std::to_string(state.k));
  ++state.k;
}

struct SspLsRunResult {
  SolveReport report;
  LsConvergenceTrace trace;
};

/// Iterate until max(||Ax-b||, ||(Cx-d)+||) <= tolerance or the epoch cap.
/// One epoch draws #blocks + #inequality-rows individual samples (one
/// expected pass through the data); both residuals are logged per epoch.
/// Nonconvergence is reported through the termination reason, not thrown.
inline SspLsRunResult ssp_ls_run(const LinearFeasibilityProblem& prob,
                                 const LsConfig& config,
                                 std::function<void(const LsState&)> on_epoch = {}) {
  config.validate();
  RandomStream stream(config.seed);

  LsState state;
  state.x = config.x0 ? prob.Y.project(*config.x0)
                      : prob.Y.project(Vector::Zero(prob.dimension()));

  const long samples_per_step =
      (prob.eq_blocks.count() > 0 ? 1 : 0) + (prob.num_ineq_rows() > 0 ? 1 : 0);
  const long samples_per_epoch = static_cast<long>(prob.eq_blocks.count()) +
                                 static_cast<long>(prob.num_ineq_rows());
  const long steps_per_epoch =
      samples_per_step > 0
          ? std::max(1L, (samples_per_epoch + samples_per_step - 1) /
                             samples_per_step)
          : 0;

  SspLsRunResult out;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed_ms = [&t0] {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  };

  Termination reason = Termination::MaxIterations;
  long epoch = 0;
  double eq_res = prob.eq_residual(state.x);
  double ineq_res = prob.ineq_residual(state.x);
  out.trace.rows.push_back({0, eq_res, ineq_res, elapsed_ms()});
  if (on_epoch) on_epoch(state);

  while (std::max(eq_res, ineq_res) > config.tolerance) {
    if (epoch >= config.max_epochs || steps_per_epoch == 0) {
      reason = Termination::MaxIterations;
      break;
    }
    if (elapsed_ms() > config.max_seconds * 1000.0) {
      reason = Termination::MaxTime;
      break;
    }
    for (long s = 0; s < steps_per_epoch; ++s)
      ssp_ls_step(state, prob, config, stream);
    ++epoch;
    eq_res = prob.eq_residual(state.x);
    ineq_res = prob.ineq_residual(state.x);
    out.trace.rows.push_back({epoch, eq_res, ineq_res, elapsed_ms()});
    if (on_epoch) on_epoch(state);
  }
  if (std::max(eq_res, ineq_res) <= config.tolerance)
    reason = Termination::ToleranceMet;

  out.report.point = state.x;
  out.report.iterations = state.k;
  out.report.epochs = epoch;
  out.report.objective_estimate = 0.5 * eq_res * eq_res;
  out.report.feasibility_residual = std::max(eq_res, ineq_res);
  out.report.termination = reason;
  out.report.elapsed_ms = elapsed_ms();
  return out;
}

}  // namespace ssp
