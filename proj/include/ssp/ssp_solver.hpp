#pragma once

#include <Eigen/Core>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>

#include "ssp/averaging.hpp"
#include "ssp/problem.hpp"
#include "ssp/prox.hpp"
#include "ssp/stepsize.hpp"
#include "ssp/trace.hpp"

namespace ssp {

struct SolverConfig {
  StepsizePolicy policy;
  double beta = 1.96;
  std::uint64_t seed = 0;
  long max_iterations = 100000;
  double max_seconds = std::numeric_limits<double>::infinity();
  /// stop when the feasibility residual drops below this and the objective
  /// estimate has stalled; 0 disables early stopping
  double tolerance = 1e-3;
  double stall_tolerance = 1e-8;  ///< relative objective change between logs
  AveragingState::Mode averaging = AveragingState::Mode::ConvexWeighted;
  long log_every = 1000;
  std::optional<Vector> x0;

  void validate() const {
    if (beta <= 0.0 || beta >= 2.0)
      throw std::invalid_argument("SolverConfig: beta must lie in (0,2)");
    if (max_iterations <= 0)
      throw std::invalid_argument("SolverConfig: max_iterations <= 0");
    if (log_every <= 0)
      throw std::invalid_argument("SolverConfig: log_every <= 0");
  }
};

struct SspState {
  long k = 0;
  Vector x;  ///< current iterate, in Y after every step
  Vector v;  ///< last proximal-gradient point
  Vector z;  ///< last feasibility point
  AveragingState averaging;
};

/// One iteration: stochastic proximal (sub)gradient step on a sampled
/// objective term, Polyak feasibility step on a sampled constraint,
/// projection onto Y. Draw order is fixed: objective index, then
/// constraint index.
inline void ssp_step(SspState& state, const CompositeProblem& problem,
                     const StepsizePolicy& policy, double beta,
                     RandomStream& stream) {
  const double alpha = policy.alpha(state.k);

  const ObjectiveSample obj = sample_objective(problem, stream);
  state.v = obj.prox(alpha, state.x - alpha * obj.subgrad(state.x));

  if (problem.num_constraints() > 0) {
    const ConstraintSample con = sample_constraint(problem, stream);
    const double h_plus = std::max(con.value(state.v), 0.0);
    if (h_plus > 0.0)
      state.z = polyak_step(state.v, h_plus, con.subgrad(state.v), beta);
    else
      state.z = state.v;
  } else {
    state.z = state.v;
  }

  state.x = problem.simple_set.project(state.z);
  if (!state.x.allFinite())
    throw std::runtime_error("ssp_step: iterate is not finite at k=" +
                             std::to_string(state.k));

  state.averaging.update(state.x, state.k, alpha, policy.L);
  ++state.k;
}

inline void update_average(AveragingState& avg, const Vector& x_k, long k,
                           double alpha_k, double L) {
  avg.update(x_k, k, alpha_k, L);
}

namespace detail {

/// Fixed evaluation panels for traces: full passes when the index sets are
/// small, seeded subsamples otherwise. The panel stream is separate from
/// the iteration stream so traces do not perturb the iterate sequence.
struct EvalPanel {
  static constexpr std::size_t kFullPassLimit = 10000;
  static constexpr std::size_t kSampleCount = 1000;

  std::vector<std::size_t> objective_indices;  // empty = weighted full pass
  std::vector<std::size_t> constraint_indices; // empty = full max
  bool objective_sampled = false;

  EvalPanel(const CompositeProblem& problem, std::uint64_t seed) {
    RandomStream panel_stream(seed ^ 0x9e3779b97f4a7c15ULL);
    if (problem.num_objective_terms() > kFullPassLimit) {
      objective_sampled = true;
      objective_indices.reserve(kSampleCount);
      for (std::size_t i = 0; i < kSampleCount; ++i)
        objective_indices.push_back(problem.objective_dist.sample(panel_stream));
    }
    if (problem.num_constraints() > kFullPassLimit) {
      constraint_indices.reserve(kFullPassLimit);
      for (std::size_t i = 0; i < kFullPassLimit; ++i)
        constraint_indices.push_back(
            problem.constraint_dist.sample(panel_stream));
    }
  }

  double objective_estimate(const CompositeProblem& problem,
                            const Vector& x) const {
    if (!problem.objective_value) return 0.0;
    if (!objective_sampled) {
      double total = 0.0;
      for (std::size_t i = 0; i < problem.num_objective_terms(); ++i)
        total += problem.objective_dist.probability(i) *
                 problem.objective_value(i, x);
      return total;
    }
    double total = 0.0;
    for (std::size_t i : objective_indices)
      total += problem.objective_value(i, x);
    return total / static_cast<double>(objective_indices.size());
  }

  double feasibility_residual(const CompositeProblem& problem,
                              const Vector& x) const {
    double worst = 0.0;
    if (constraint_indices.empty()) {
      for (std::size_t i = 0; i < problem.num_constraints(); ++i)
        worst = std::max(worst, problem.constraint_value(i, x));
    } else {
      for (std::size_t i : constraint_indices)
        worst = std::max(worst, problem.constraint_value(i, x));
    }
    return std::max(worst, 0.0);
  }
};

}  // namespace detail

struct SspRunResult {
  SolveReport report;
  ConvergenceTrace trace;
};

/// Run the solver until the stopping rule fires. The reported point is the
/// configured average (last iterate for LastIterate mode).
inline SspRunResult ssp_run(const CompositeProblem& problem,
                            const SolverConfig& config) {
  problem.validate();
  config.validate();

  RandomStream stream(config.seed);
  const detail::EvalPanel panel(problem, config.seed);

  SspState state;
  state.x = config.x0 ? problem.simple_set.project(*config.x0)
                      : problem.simple_set.project(
                            Vector::Zero(problem.dimension));
  switch (config.averaging) {
    case AveragingState::Mode::ConvexWeighted:
      state.averaging = AveragingState::convex_weighted(problem.dimension);
      break;
    case AveragingState::Mode::StronglyConvexWeighted: {
      const long k0 = config.policy.mu > 0.0
                          ? switching_k0(config.policy.L, config.policy.mu)
                          : 0;
      state.averaging =
          AveragingState::strongly_convex_weighted(problem.dimension, k0);
      break;
    }
    case AveragingState::Mode::LastIterate:
      state.averaging = AveragingState::last_iterate(problem.dimension);
      break;
  }
  state.averaging.update(state.x, -1, 0.0, 0.0);  // seed last-iterate storage

  SspRunResult out;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed_ms = [&t0] {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  };

  double prev_obj = std::numeric_limits<double>::quiet_NaN();
  Termination reason = Termination::MaxIterations;

  auto log_row = [&](long k, double alpha) {
    const Vector point = state.averaging.average();
    TraceRow row;
    row.iter = k;
    row.alpha = alpha;
    row.obj_est = panel.objective_estimate(problem, point);
    row.feas_residual = panel.feasibility_residual(problem, point);
    if (problem.optimum_point)
      row.dist_sq_opt = (point - *problem.optimum_point).squaredNorm();
    row.elapsed_ms = elapsed_ms();
    out.trace.rows.push_back(row);
    return row;
  };

  bool stopped = false;
  while (state.k < config.max_iterations) {
    ssp_step(state, problem, config.policy, config.beta, stream);

    if (state.k % config.log_every == 0 || state.k == config.max_iterations) {
      const TraceRow row = log_row(state.k, config.policy.alpha(state.k - 1));
      if (config.tolerance > 0.0 && row.feas_residual <= config.tolerance) {
        const bool stalled =
            !problem.objective_value ||
            (std::isfinite(prev_obj) &&
             std::abs(row.obj_est - prev_obj) <=
                 config.stall_tolerance * std::max(1.0, std::abs(prev_obj)));
        if (stalled) {
          reason = Termination::ToleranceMet;
          stopped = true;
        }
      }
      prev_obj = row.obj_est;
      if (!stopped && elapsed_ms() > config.max_seconds * 1000.0) {
        reason = Termination::MaxTime;
        stopped = true;
      }
      if (stopped) break;
    }
  }

  if (out.trace.rows.empty() || out.trace.rows.back().iter != state.k)
    log_row(state.k, config.policy.alpha(std::max(state.k - 1, 0L)));

  const TraceRow& last = out.trace.rows.back();
  out.report.point = state.averaging.average();
  out.report.iterations = state.k;
  out.report.epochs =
      problem.num_constraints() + problem.num_objective_terms() > 0
          ? state.k / static_cast<long>(std::max<std::size_t>(
                          1, problem.num_constraints() +
                                 problem.num_objective_terms()))
          : state.k;
  out.report.objective_estimate = last.obj_est;
  out.report.feasibility_residual = last.feas_residual;
  out.report.termination = reason;
  out.report.elapsed_ms = elapsed_ms();
  return out;
}

}  // namespace ssp
