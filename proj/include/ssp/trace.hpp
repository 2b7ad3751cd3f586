#pragma once

#include <Eigen/Core>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ssp {

/// Round-trip formatting: %.17g parses back to the identical double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

enum class Termination { ToleranceMet, MaxIterations, MaxTime };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::ToleranceMet: return "tolerance_met";
    case Termination::MaxIterations: return "max_iterations";
    case Termination::MaxTime: return "max_time";
  }
  return "unknown";
}

struct SolveReport {
  Eigen::VectorXd point;         ///< average or last iterate, per config
  long iterations = 0;
  long epochs = 0;
  double objective_estimate = 0.0;
  double feasibility_residual = 0.0;
  Termination termination = Termination::MaxIterations;
  double elapsed_ms = 0.0;
};

/// Per-logging-interval metrics of a general solver run.
struct TraceRow {
  long iter = 0;
  double alpha = 0.0;
  double obj_est = 0.0;
  double feas_residual = 0.0;
  std::optional<double> dist_sq_opt;  ///< empty when no optimum hint
  double elapsed_ms = 0.0;
};

struct ConvergenceTrace {
  std::vector<TraceRow> rows;

  void write_csv(std::ostream& os) const {
    os << "iter,alpha,obj_est,feas_residual,dist_sq_opt,elapsed_ms\n";
    for (const auto& r : rows) {
      os << r.iter << ',' << format_double(r.alpha) << ','
         << format_double(r.obj_est) << ',' << format_double(r.feas_residual)
         << ',';
      if (r.dist_sq_opt) os << format_double(*r.dist_sq_opt);
      os << ',' << format_double(r.elapsed_ms) << '\n';
    }
  }
};

/// Per-epoch residual metrics of a linear feasibility run.
struct LsTraceRow {
  long epoch = 0;
  double eq_residual = 0.0;
  double ineq_residual = 0.0;
  double elapsed_ms = 0.0;
};

struct LsConvergenceTrace {
  std::vector<LsTraceRow> rows;

  void write_csv(std::ostream& os) const {
    os << "epoch,eq_residual,ineq_residual,elapsed_ms\n";
    for (const auto& r : rows) {
      os << r.epoch << ',' << format_double(r.eq_residual) << ','
         << format_double(r.ineq_residual) << ',' << format_double(r.elapsed_ms)
         << '\n';
    }
  }
};

}  // namespace ssp
