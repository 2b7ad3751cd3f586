// Command line front end: constrained least squares / LP feasibility /
// sparse SVM / robust SVM solvers with CSV traces and key=value reports.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <future>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ssp/ssp.hpp"

namespace {

struct Options {
  std::string A_path, b_path, C_path, d_path, c_path, data_path;
  double lambda = 0.1;
  double rho = 0.0;
  std::string cov_mode = "dependent";
  double delta = 1.96;
  double beta = 1.96;
  double alpha0 = 0.0;  // 0 = auto from L
  double gamma = 0.5;
  double mu = 0.0;
  double L = 0.0;
  std::string policy = "poly";
  std::uint64_t seed = 0;
  double tol = 1e-3;
  long max_epochs = 2000;
  long max_iterations = 200000;
  std::string trace_path, report_path;
  long log_every = 1000;
  int seeds = 4;  // bench only
};

void add_solver_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--delta", o.delta, "adaptive stepsize scale, in (0,2)");
  cmd->add_option("--beta", o.beta, "feasibility step relaxation, in (0,2)");
  cmd->add_option("--alpha0", o.alpha0, "base stepsize (0 = auto from L)");
  cmd->add_option("--gamma", o.gamma, "stepsize decay exponent, in [0,1)");
  cmd->add_option("--mu", o.mu, "strong convexity modulus");
  cmd->add_option("--L", o.L, "gradient growth constant");
  cmd->add_option("--policy", o.policy, "stepsize policy: poly|switch|const")
      ->check(CLI::IsMember({"poly", "switch", "const"}));
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--tol", o.tol, "stopping tolerance");
  cmd->add_option("--max-epochs", o.max_epochs, "epoch cap");
  cmd->add_option("--max-iterations", o.max_iterations, "iteration cap");
  cmd->add_option("--trace", o.trace_path, "trace CSV output path");
  cmd->add_option("--report", o.report_path, "summary report output path");
  cmd->add_option("--log-every", o.log_every, "iterations between trace rows");
}

int exit_code(ssp::Termination t) {
  return t == ssp::Termination::ToleranceMet ? 0 : 2;
}

template <typename Trace>
void emit_trace(const Options& o, const Trace& trace) {
  if (o.trace_path.empty()) return;
  std::ofstream out(o.trace_path);
  if (!out) throw std::runtime_error("cannot write '" + o.trace_path + "'");
  trace.write_csv(out);
}

void emit_report(
    const Options& o,
    const std::vector<std::pair<std::string, std::string>>& entries) {
  if (o.report_path.empty()) {
    ssp::write_report(std::cout, entries);
    return;
  }
  std::ofstream out(o.report_path);
  if (!out) throw std::runtime_error("cannot write '" + o.report_path + "'");
  ssp::write_report(out, entries);
}

ssp::LinearFeasibilityProblem load_feasibility(const Options& o,
                                               bool require_equalities) {
  ssp::RowMatrix A, C;
  ssp::Vector b, d;
  if (!o.A_path.empty()) {
    A = ssp::read_matrix_market(o.A_path).matrix;
    b = ssp::read_matrix_market(o.b_path).vector();
  } else if (require_equalities) {
    throw std::runtime_error("missing required --A/--b");
  }
  if (!o.C_path.empty()) {
    C = ssp::read_matrix_market(o.C_path).matrix;
    d = ssp::read_matrix_market(o.d_path).vector();
  }
  if (A.rows() == 0 && C.rows() == 0)
    throw std::runtime_error("no constraints given (need --A/--b or --C/--d)");
  const Eigen::Index n = A.rows() > 0 ? A.cols() : C.cols();
  if (A.rows() == 0) A.resize(0, n);
  if (C.rows() == 0) C.resize(0, n);
  if (b.size() == 0) b.resize(0);
  if (d.size() == 0) d.resize(0);
  return ssp::LinearFeasibilityProblem::create(std::move(A), std::move(b),
                                               std::move(C), std::move(d));
}

ssp::LsConfig ls_config(const Options& o) {
  ssp::LsConfig cfg;
  cfg.delta = o.delta;
  cfg.beta = o.beta;
  cfg.tolerance = o.tol;
  cfg.max_epochs = o.max_epochs;
  cfg.seed = o.seed;
  return cfg;
}

std::vector<std::pair<std::string, std::string>> ls_report_entries(
    const ssp::SspLsRunResult& result) {
  const auto& last = result.trace.rows.back();
  return {
      {"status", ssp::to_string(result.report.termination)},
      {"epochs", std::to_string(result.report.epochs)},
      {"eq_residual", ssp::format_double(last.eq_residual)},
      {"ineq_residual", ssp::format_double(last.ineq_residual)},
      {"obj_est", ssp::format_double(result.report.objective_estimate)},
  };
}

int run_feasibility(const Options& o, bool require_equalities) {
  const auto prob = load_feasibility(o, require_equalities);
  const auto result = ssp_ls_run(prob, ls_config(o));
  emit_trace(o, result.trace);
  emit_report(o, ls_report_entries(result));
  return exit_code(result.report.termination);
}

int run_lp(const Options& o) {
  if (o.c_path.empty() || o.C_path.empty() || o.d_path.empty())
    throw std::runtime_error("lp needs --c, --C and --d");
  const ssp::Vector c = ssp::read_matrix_market(o.c_path).vector();
  const ssp::RowMatrix C_lp = ssp::read_matrix_market(o.C_path).matrix;
  const ssp::Vector d_lp = ssp::read_matrix_market(o.d_path).vector();

  const auto prob = ssp::build_lp_feasibility(c, C_lp, d_lp);
  const auto result = ssp_ls_run(prob, ls_config(o));
  emit_trace(o, result.trace);

  auto entries = ls_report_entries(result);
  const double objective = c.dot(result.report.point.head(c.size()));
  entries.emplace_back("lp_objective", ssp::format_double(objective));
  emit_report(o, entries);
  return exit_code(result.report.termination);
}

/// Seeded 80/20 shuffle split.
void split_dataset(const ssp::LabeledDataset& data, std::uint64_t seed,
                   ssp::LabeledDataset& train, ssp::LabeledDataset& test) {
  const Eigen::Index N = data.size();
  std::vector<Eigen::Index> order(N);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  ssp::RandomStream stream(seed ^ 0x5851f42d4c957f2dULL);
  for (Eigen::Index i = N - 1; i > 0; --i)
    std::swap(order[i], order[stream.uniform_index(i + 1)]);

  const Eigen::Index n_train = std::max<Eigen::Index>(1, (N * 8) / 10);
  auto take = [&](Eigen::Index from, Eigen::Index count,
                  ssp::LabeledDataset& out) {
    std::vector<Eigen::Triplet<double>> trips;
    out.labels.resize(count);
    for (Eigen::Index r = 0; r < count; ++r) {
      const Eigen::Index src = order[from + r];
      out.labels[r] = data.labels[src];
      for (ssp::RowMatrix::InnerIterator it(data.features, src); it; ++it)
        trips.emplace_back(r, it.col(), it.value());
    }
    out.features.resize(count, data.num_features());
    out.features.setFromTriplets(trips.begin(), trips.end());
  };
  take(0, n_train, train);
  take(n_train, N - n_train, test);
}

long count_ordinary_errors(const ssp::LabeledDataset& data,
                           const ssp::Vector& w, double d) {
  long errors = 0;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const auto c =
        ssp::classify(ssp::ClassifyRule::Ordinary, w, d, data.feature_row(i));
    if (c.label != data.labels[i]) ++errors;
  }
  return errors;
}

long count_nonzero(const ssp::Vector& w, double cutoff = 1e-4) {
  long nnz = 0;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (std::abs(w[i]) > cutoff) ++nnz;
  return nnz;
}

int run_svm(const Options& o) {
  if (o.data_path.empty()) throw std::runtime_error("svm needs --data");
  const auto data = ssp::read_libsvm(o.data_path);
  ssp::LabeledDataset train, test;
  split_dataset(data, o.seed, train, test);

  const auto model = ssp::build_sparse_svm_lp(train, o.lambda);
  const auto result = ssp_ls_run(model.problem, ls_config(o));
  emit_trace(o, result.trace);

  const auto cls = model.decode(result.report.point);
  auto entries = ls_report_entries(result);
  entries.emplace_back("nnz_w", std::to_string(count_nonzero(cls.w)));
  entries.emplace_back(
      "ordinary_errors_train",
      std::to_string(count_ordinary_errors(train, cls.w, cls.d)));
  entries.emplace_back(
      "ordinary_errors_test",
      std::to_string(count_ordinary_errors(test, cls.w, cls.d)));
  emit_report(o, entries);
  return exit_code(result.report.termination);
}

int run_robust_svm(const Options& o) {
  if (o.data_path.empty()) throw std::runtime_error("robust-svm needs --data");
  const auto data = ssp::read_libsvm(o.data_path);
  ssp::LabeledDataset train, test;
  split_dataset(data, o.seed, train, test);

  const auto mode = o.cov_mode == "independent"
                        ? ssp::EllipsoidModel::Mode::ClassIndependent
                        : ssp::EllipsoidModel::Mode::ClassDependent;
  const auto ellipsoids = ssp::covariance_from_data(train, mode, o.rho);
  const auto model = ssp::build_robust_svm(train, o.lambda, ellipsoids);

  ssp::SolverConfig cfg;
  const double L = o.L;
  if (o.policy == "switch") {
    cfg.policy = ssp::StepsizePolicy::switching(L, o.mu);
    cfg.averaging = ssp::AveragingState::Mode::StronglyConvexWeighted;
  } else if (o.policy == "const") {
    const double alpha =
        o.alpha0 > 0.0 ? o.alpha0
                       : 0.9 * ssp::stepsize_upper_bound_convex(L);
    cfg.policy = ssp::StepsizePolicy::constant(alpha, L, o.mu);
  } else {
    const double alpha =
        o.alpha0 > 0.0 ? o.alpha0
                       : 0.9 * ssp::stepsize_upper_bound_convex(L);
    cfg.policy = ssp::StepsizePolicy::polynomial_decay(alpha, o.gamma, L);
  }
  cfg.beta = o.beta;
  cfg.seed = o.seed;
  cfg.tolerance = o.tol;
  cfg.max_iterations = o.max_iterations;
  cfg.log_every = o.log_every;

  const auto result = ssp_run(model.problem, cfg);
  emit_trace(o, result.trace);

  const ssp::Vector w = model.weights(result.report.point);
  const double d = model.offset(result.report.point);

  long wc_errors = 0;
  if (o.rho > 0.0) {
    for (Eigen::Index i = 0; i < train.size(); ++i) {
      const ssp::Vector q = ellipsoids.shape_diag(train.labels[i]);
      const auto c = ssp::classify(ssp::ClassifyRule::WorstCase, w, d,
                                   train.feature_row(i), &q);
      if (c.label != train.labels[i] || c.wc_intersects) ++wc_errors;
    }
  }

  std::vector<std::pair<std::string, std::string>> entries = {
      {"status", ssp::to_string(result.report.termination)},
      {"epochs", std::to_string(result.report.epochs)},
      {"eq_residual", "0"},
      {"ineq_residual",
       ssp::format_double(result.report.feasibility_residual)},
      {"obj_est", ssp::format_double(result.report.objective_estimate)},
      {"nnz_w", std::to_string(count_nonzero(w))},
      {"ordinary_errors_train",
       std::to_string(count_ordinary_errors(train, w, d))},
      {"worst_case_errors_train", std::to_string(wc_errors)},
      {"ordinary_errors_test",
       std::to_string(count_ordinary_errors(test, w, d))},
  };
  emit_report(o, entries);
  return exit_code(result.report.termination);
}

int run_bench(const Options& o) {
  const auto prob = load_feasibility(o, false);
  std::vector<std::future<ssp::SspLsRunResult>> futures;
  for (int s = 0; s < o.seeds; ++s) {
    futures.push_back(std::async(std::launch::async, [&, s] {
      Options local = o;
      local.seed = o.seed + static_cast<std::uint64_t>(s);
      return ssp_ls_run(prob, ls_config(local));
    }));
  }
  std::vector<std::pair<std::string, std::string>> entries;
  int worst = 0;
  for (int s = 0; s < o.seeds; ++s) {
    const auto result = futures[static_cast<std::size_t>(s)].get();
    if (!o.trace_path.empty()) {
      Options local = o;
      local.trace_path = o.trace_path + ".seed" + std::to_string(o.seed + s);
      emit_trace(local, result.trace);
    }
    entries.emplace_back("epochs_seed" + std::to_string(o.seed + s),
                         std::to_string(result.report.epochs));
    worst = std::max(worst, exit_code(result.report.termination));
  }
  emit_report(o, entries);
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic subgradient projection solvers"};
  app.require_subcommand(1);
  Options o;

  auto* ls = app.add_subcommand("ls", "constrained least squares: Ax=b, Cx<=d");
  ls->add_option("--A", o.A_path, "equality matrix (Matrix Market)");
  ls->add_option("--b", o.b_path, "equality right-hand side");
  ls->add_option("--C", o.C_path, "inequality matrix");
  ls->add_option("--d", o.d_path, "inequality right-hand side");
  add_solver_flags(ls, o);

  auto* feas = app.add_subcommand("feasibility",
                                  "linear feasibility with optional parts");
  feas->add_option("--A", o.A_path, "equality matrix");
  feas->add_option("--b", o.b_path, "equality right-hand side");
  feas->add_option("--C", o.C_path, "inequality matrix");
  feas->add_option("--d", o.d_path, "inequality right-hand side");
  add_solver_flags(feas, o);

  auto* lp = app.add_subcommand("lp", "LP via primal-dual feasibility");
  lp->add_option("--c", o.c_path, "LP cost vector");
  lp->add_option("--C", o.C_path, "LP constraint matrix");
  lp->add_option("--d", o.d_path, "LP right-hand side");
  add_solver_flags(lp, o);

  auto* svm = app.add_subcommand("svm", "sparse linear SVM via LP");
  svm->add_option("--data", o.data_path, "LIBSVM dataset");
  svm->add_option("--lambda", o.lambda, "slack weight");
  add_solver_flags(svm, o);

  auto* rsvm = app.add_subcommand("robust-svm",
                                  "robust sparse SVM with ellipsoids");
  rsvm->add_option("--data", o.data_path, "LIBSVM dataset");
  rsvm->add_option("--lambda", o.lambda, "slack weight");
  rsvm->add_option("--rho", o.rho, "noise level, in [0,1]");
  rsvm->add_option("--cov-mode", o.cov_mode, "dependent|independent")
      ->check(CLI::IsMember({"dependent", "independent"}));
  add_solver_flags(rsvm, o);

  auto* bench = app.add_subcommand("bench", "multi-seed feasibility sweep");
  bench->add_option("--A", o.A_path, "equality matrix");
  bench->add_option("--b", o.b_path, "equality right-hand side");
  bench->add_option("--C", o.C_path, "inequality matrix");
  bench->add_option("--d", o.d_path, "inequality right-hand side");
  bench->add_option("--seeds", o.seeds, "number of seeds");
  add_solver_flags(bench, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    if (ls->parsed()) return run_feasibility(o, true);
    if (feas->parsed()) return run_feasibility(o, false);
    if (lp->parsed()) return run_lp(o);
    if (svm->parsed()) return run_svm(o);
    if (rsvm->parsed()) return run_robust_svm(o);
    if (bench->parsed()) return run_bench(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
