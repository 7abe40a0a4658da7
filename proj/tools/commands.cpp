#include "commands.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>

#include "adjblas/adjoint.hpp"
#include "adjblas/bench.hpp"
#include "adjblas/lu.hpp"
#include "adjblas/matrix_io.hpp"
#include "adjblas/verify/report.hpp"
#include "adjblas/verify/suite.hpp"

namespace adjblas::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

/// Carries an exit status out of a subcommand.
struct Exit {
  int code;
  std::string message;
};

std::uint64_t default_seed() {
  const char* env = std::getenv("ADJBLAS_SEED");
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (errno != 0 || *end != '\0' || env[0] == '-') {
    throw Exit{kUsageError, std::string("invalid ADJBLAS_SEED: ") + env};
  }
  return v;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Exit{kUsageError, "cannot write " + path};
  return f;
}

std::string human(double v) { return fmt::format("{:.6g}", v == 0.0 ? 0.0 : v); }

// ---- verify ----

struct VerifyOptions {
  bool all = false;
  std::vector<std::string> checks;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<long> max_dim;
  std::vector<std::string> tolerances;
  std::string json;
  std::string csv;
};

void write_verify_csv(std::ostream& out, const std::vector<verify::VerificationReport>& reports) {
  out << "check_name,residual,tolerance,passed,trials,seed\n";
  for (const auto& r : reports) {
    out << r.check_name << ',' << verify::format_real(r.residual) << ','
        << verify::format_real(r.tolerance) << ',' << (r.passed ? "true" : "false") << ','
        << r.trials << ',' << r.seed << '\n';
  }
}

int cmd_verify(const VerifyOptions& o, std::ostream& out) {
  verify::SuiteConfig cfg;
  if (!o.all && !o.checks.empty()) cfg.checks = o.checks;
  cfg.seed = o.seed.value_or(default_seed());
  cfg.trials = o.trials;
  if (o.max_dim) {
    if (*o.max_dim < 1) throw Exit{kUsageError, "--max-dim must be at least 1"};
    cfg.max_dim = *o.max_dim;
  }
  for (const auto& t : o.tolerances) {
    const auto eq = t.find('=');
    char* end = nullptr;
    const double v = eq == std::string::npos ? 0.0 : std::strtod(t.c_str() + eq + 1, &end);
    if (eq == std::string::npos || end == t.c_str() + eq + 1 || *end != '\0' || !(v >= 0.0)) {
      throw Exit{kUsageError, "invalid --tol '" + t + "', expected NAME=VALUE"};
    }
    cfg.tolerances[t.substr(0, eq)] = v;
  }
  for (const auto& c : cfg.checks) {
    const auto& groups = verify::check_groups();
    if (c != "sum-sandwich" && std::find(groups.begin(), groups.end(), c) == groups.end()) {
      throw Exit{kUsageError, "unknown check: " + c};
    }
  }

  const auto reports = verify::run_suite(cfg);
  for (const auto& r : reports) {
    out << fmt::format("{:<4}  {:<36} residual {:<12} tol {:<8} trials {}\n",
                       r.passed ? "PASS" : "FAIL", r.check_name, human(r.residual),
                       human(r.tolerance), r.trials);
  }
  const auto failed = std::count_if(reports.begin(), reports.end(), [](const auto& r) { return !r.passed; });
  if (failed == 0) {
    out << fmt::format("all {} checks passed (seed {})\n", reports.size(), cfg.seed);
  } else {
    out << fmt::format("{} of {} checks FAILED (seed {})\n", failed, reports.size(), cfg.seed);
  }
  if (!o.json.empty()) {
    auto f = open_output(o.json);
    verify::write_json_lines(f, reports);
  }
  if (!o.csv.empty()) {
    auto f = open_output(o.csv);
    write_verify_csv(f, reports);
  }
  return failed == 0 ? kOk : kVerificationFailed;
}

// ---- bench ----

struct BenchOptions {
  std::vector<Index> sizes{64, 128, 256};
  std::uint64_t adjoints = 16;
  std::uint64_t reps = 1;
  std::optional<std::uint64_t> seed;
  std::string json;
  std::string csv;
};

int cmd_bench(const BenchOptions& o, std::ostream& out) {
  BenchConfig cfg;
  for (Index n : o.sizes) {
    if (n < 2) throw Exit{kUsageError, fmt::format("invalid size {}: sizes must be at least 2", n)};
  }
  cfg.sizes = o.sizes;
  if (std::set<Index>(o.sizes.begin(), o.sizes.end()).size() < 2) {
    throw Exit{kUsageError, "bench needs at least two distinct sizes to fit growth exponents"};
  }
  if (o.adjoints < 1) throw Exit{kUsageError, "-k must be at least 1"};
  if (o.reps < 1) throw Exit{kUsageError, "--reps must be at least 1"};
  cfg.adjoint_count = o.adjoints;
  cfg.repetitions = o.reps;
  cfg.seed = o.seed.value_or(default_seed());

  const auto records = run_bench(cfg);
  out << fmt::format("{:>6} {:>6} {:>16} {:>16} {:>12} {:>12}\n", "n", "reuse", "factor_flops",
                     "solve_flops/adj", "t_factor[s]", "t_adj[s]");
  for (const auto& r : records) {
    out << fmt::format("{:>6} {:>6} {:>16} {:>16} {:>12} {:>12}\n", r.n, r.reuse ? "yes" : "no",
                       r.factor_flops, r.solve_flops_per_adjoint, human(r.wall_time_factor),
                       human(r.wall_time_adjoint_solve));
  }
  const auto e = fit_bench_exponents(records);
  out << fmt::format("fitted flop growth: factorization n^{}, reused adjoint solve n^{}\n",
                     human(e.factor), human(e.reused_adjoint_solve));
  out << fmt::format("k = {} adjoint solves: {} factorization(s) with reuse, {} without\n",
                     cfg.adjoint_count, 1, cfg.adjoint_count + 1);
  if (*std::min_element(cfg.sizes.begin(), cfg.sizes.end()) < 16) {
    out << "note: sizes below 16 are dominated by lower-order terms; the fitted exponents "
           "are only indicative\n";
  }
  if (!o.json.empty()) {
    auto f = open_output(o.json);
    write_bench_json_lines(f, records);
  }
  if (!o.csv.empty()) {
    auto f = open_output(o.csv);
    write_bench_csv(f, records);
  }
  return kOk;
}

// ---- demo ----

struct DemoOptions {
  std::string matrix;
  std::string rhs;
  std::string seed_vector;
  std::optional<long> seed_unit;
  bool second_order = false;
  std::string a_dot;
  std::string b_dot;
  std::string x_adj_dot;
  std::string json;
  std::string csv;
};

DenseMatrix load_matrix(const std::string& path) {
  try {
    return read_matrix_file(path);
  } catch (const ParseError& e) {
    throw Exit{kUsageError, path + ": " + e.what()};
  } catch (const Error& e) {
    throw Exit{kUsageError, e.what()};
  }
}

DenseVector load_vector(const std::string& path, Index n, const char* what) {
  DenseMatrix m = load_matrix(path);
  if (m.cols() != 1 && m.rows() == 1) m.transposeInPlace();
  if (m.cols() != 1 || m.rows() != n) {
    throw Exit{kUsageError, fmt::format("{}: {} must be a vector of length {}, got {}x{}", path,
                                        what, n, m.rows(), m.cols())};
  }
  return m.col(0);
}

std::string vec_str(const DenseVector& v) {
  std::string s = "(";
  for (Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + human(v(i));
  return s + ")";
}

void print_matrix(std::ostream& out, const std::string& name, const DenseMatrix& m) {
  out << name << " =\n";
  for (Index i = 0; i < m.rows(); ++i) {
    out << "  [";
    for (Index j = 0; j < m.cols(); ++j) out << (j ? ", " : "") << fmt::format("{:>12}", human(m(i, j)));
    out << "]\n";
  }
}

std::string json_vec(const DenseVector& v) {
  std::string s = "[";
  for (Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + verify::format_real(v(i));
  return s + "]";
}

std::string json_mat(const DenseMatrix& m) {
  std::string s = "[";
  for (Index i = 0; i < m.rows(); ++i) s += (i ? "," : "") + json_vec(m.row(i).transpose());
  return s + "]";
}

void csv_rows(std::ostream& out, const std::string& name, const DenseMatrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      out << name << ',' << i << ',' << j << ',' << verify::format_real(m(i, j)) << '\n';
    }
  }
}

int cmd_demo(const DemoOptions& o, std::ostream& out) {
  const DenseMatrix A = load_matrix(o.matrix);
  if (A.rows() != A.cols()) {
    throw Exit{kUsageError, fmt::format("{}: matrix must be square, got {}x{}", o.matrix, A.rows(), A.cols())};
  }
  const Index n = A.rows();
  const DenseVector b = load_vector(o.rhs, n, "right-hand side");
  DenseVector x_adj;
  if (o.seed_unit) {
    if (*o.seed_unit < 0 || *o.seed_unit >= n) {
      throw Exit{kUsageError, fmt::format("--seed-unit {} out of range for n = {}", *o.seed_unit, n)};
    }
    x_adj = DenseVector::Unit(n, *o.seed_unit);
  } else if (!o.seed_vector.empty()) {
    x_adj = load_vector(o.seed_vector, n, "adjoint seed");
  } else {
    throw Exit{kUsageError, "demo needs --seed-vector FILE or --seed-unit I"};
  }

  std::optional<LUFactorization<double>> F;
  try {
    F = lu_factor(A);
  } catch (const SingularMatrixError& e) {
    throw Exit{kNumericalFailure, e.what()};
  }
  const DenseVector x = lu_solve(*F, b);
  const auto adj = solve_adjoint(*F, x, x_adj);

  out << "x     = " << vec_str(x) << '\n';
  out << "b_adj = " << vec_str(adj.b_adj) << '\n';
  print_matrix(out, "A_adj", adj.A_adj);

  std::optional<SolveSecondOrderAdjoint<double>> so;
  if (o.second_order) {
    const DenseMatrix A_dot = o.a_dot.empty() ? DenseMatrix::Zero(n, n) : load_matrix(o.a_dot);
    if (A_dot.rows() != n || A_dot.cols() != n) {
      throw Exit{kUsageError, fmt::format("{}: A_dot must be {}x{}", o.a_dot, n, n)};
    }
    const DenseVector b_dot = o.b_dot.empty() ? DenseVector::Zero(n) : load_vector(o.b_dot, n, "b_dot");
    const DenseVector x_adj_dot =
        o.x_adj_dot.empty() ? DenseVector::Zero(n) : load_vector(o.x_adj_dot, n, "x_adj_dot");
    so = solve_second_order_adjoint(*F, x, x_adj, A_dot, b_dot, x_adj_dot);
    out << "b_adj_dot = " << vec_str(so->b_adj_dot) << '\n';
    print_matrix(out, "A_adj_dot", so->A_adj_dot);
  }

  if (!o.json.empty()) {
    auto f = open_output(o.json);
    f << "{\"x\":" << json_vec(x) << ",\"b_adj\":" << json_vec(adj.b_adj)
      << ",\"A_adj\":" << json_mat(adj.A_adj);
    if (so) {
      f << ",\"b_adj_dot\":" << json_vec(so->b_adj_dot) << ",\"A_adj_dot\":" << json_mat(so->A_adj_dot);
    }
    f << "}\n";
  }
  if (!o.csv.empty()) {
    auto f = open_output(o.csv);
    f << "quantity,row,col,value\n";
    csv_rows(f, "x", x);
    csv_rows(f, "b_adj", adj.b_adj);
    csv_rows(f, "A_adj", adj.A_adj);
    if (so) {
      csv_rows(f, "b_adj_dot", so->b_adj_dot);
      csv_rows(f, "A_adj_dot", so->A_adj_dot);
    }
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tangent and adjoint rules for dense linear algebra"};
  app.name("adjblas");
  app.require_subcommand(1);

  VerifyOptions vo;
  auto* verify_cmd = app.add_subcommand("verify", "Run derivative verification checks");
  verify_cmd->add_flag("--all", vo.all, "Run every check group (default)");
  verify_cmd->add_option("--check", vo.checks, "Check group to run (repeatable)")->delimiter(',');
  verify_cmd->add_option("--seed", vo.seed, "Random seed (default: $ADJBLAS_SEED or 42)");
  verify_cmd->add_option("--trials", vo.trials, "Override every check's trial count");
  verify_cmd->add_option("--max-dim", vo.max_dim, "Upper bound on random dimensions");
  verify_cmd->add_option("--tol", vo.tolerances, "Tolerance override NAME=VALUE (repeatable)");
  verify_cmd->add_option("--json", vo.json, "Write reports as JSON lines");
  verify_cmd->add_option("--csv", vo.csv, "Write reports as CSV");

  BenchOptions bo;
  auto* bench_cmd = app.add_subcommand("bench", "Flop-counted factorization reuse benchmark");
  bench_cmd->add_option("--sizes", bo.sizes, "Matrix orders, e.g. 64,128,256")->delimiter(',');
  bench_cmd->add_option("-k,--adjoints", bo.adjoints, "Adjoint solves per size");
  bench_cmd->add_option("--reps", bo.reps, "Timing repetitions");
  bench_cmd->add_option("--seed", bo.seed, "Random seed (default: $ADJBLAS_SEED or 42)");
  bench_cmd->add_option("--json", bo.json, "Write records as JSON lines");
  bench_cmd->add_option("--csv", bo.csv, "Write records as CSV");

  DemoOptions dopt;
  auto* demo_cmd = app.add_subcommand("demo", "Sensitivities of a linear system A x = b");
  demo_cmd->add_option("--matrix", dopt.matrix, "Matrix file")->required();
  demo_cmd->add_option("--rhs", dopt.rhs, "Right-hand side file")->required();
  auto* sv = demo_cmd->add_option("--seed-vector", dopt.seed_vector, "Adjoint seed x_adj file");
  auto* su = demo_cmd->add_option("--seed-unit", dopt.seed_unit, "Use unit vector e_i as x_adj");
  sv->excludes(su);
  demo_cmd->add_flag("--second-order", dopt.second_order, "Also compute second-order adjoints");
  demo_cmd->add_option("--a-dot", dopt.a_dot, "Tangent of A (default zero)");
  demo_cmd->add_option("--b-dot", dopt.b_dot, "Tangent of b (default zero)");
  demo_cmd->add_option("--xadj-dot", dopt.x_adj_dot, "Tangent of x_adj (default zero)");
  demo_cmd->add_option("--json", dopt.json, "Write results as JSON");
  demo_cmd->add_option("--csv", dopt.csv, "Write results as CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  try {
    if (verify_cmd->parsed()) return cmd_verify(vo, out);
    if (bench_cmd->parsed()) return cmd_bench(bo, out);
    if (demo_cmd->parsed()) return cmd_demo(dopt, out);
  } catch (const Exit& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  } catch (const SingularMatrixError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace adjblas::cli
