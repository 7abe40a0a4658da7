#include "adjblas/verify/suite.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "adjblas/adjoint.hpp"
#include "adjblas/bench.hpp"
#include "adjblas/flops.hpp"
#include "adjblas/lu.hpp"
#include "adjblas/tangent.hpp"
#include "adjblas/tape.hpp"
#include "adjblas/verify/fd.hpp"
#include "adjblas/verify/identity.hpp"
#include "adjblas/verify/programs.hpp"
#include "adjblas/verify/random.hpp"
#include "adjblas/verify/scalar_oracle.hpp"

namespace adjblas::verify {

const std::vector<std::string>& check_groups() {
  static const std::vector<std::string> groups = {
      "mul",   "dot",          "gemv", "gemm",  "sandwich", "sum_sandwich",
      "solve", "second_order", "tape", "reuse", "collapse"};
  return groups;
}

bool all_passed(const std::vector<VerificationReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed; });
}

namespace {

struct Context {
  const SuiteConfig& cfg;
  std::vector<VerificationReport>& out;

  std::uint64_t trials(std::uint64_t fallback) const { return cfg.trials.value_or(fallback); }
  Index dim(Index fallback) const { return std::max<Index>(1, std::min(fallback, cfg.max_dim)); }
  double tolerance(const std::string& name, double fallback) const {
    const auto it = cfg.tolerances.find(name);
    return it == cfg.tolerances.end() ? fallback : it->second;
  }

  /// Runs `trial` `n` times with a generator seeded from the report name and
  /// records the worst residual.
  void run(const std::string& name, std::uint64_t default_trials, double default_tol,
           const std::function<double(Rng&)>& trial) {
    const std::uint64_t n = trials(default_trials);
    Rng rng(derive_seed(cfg.seed, name));
    double worst = 0.0;
    for (std::uint64_t t = 0; t < n; ++t) {
      const double r = trial(rng);
      if (std::isnan(r)) {
        worst = r;
        break;
      }
      worst = std::max(worst, r);
    }
    out.push_back(make_report(name, worst, tolerance(name, default_tol), n, cfg.seed));
  }

  void identity(const std::string& pair, double default_tol) {
    const std::string name = "identity/" + (pair == "sum-sandwich" ? std::string("sum_sandwich") : pair);
    Dims dims = Dims::uniform(dim(16), true);
    const std::uint64_t n = trials(100);
    auto r = check_identity(pair, dims, n, cfg.seed, tolerance(name, default_tol));
    out.push_back(r);
  }
};

double tangent_error_fd(const std::function<DenseMatrix(double)>& f, const DenseMatrix& analytic) {
  return scaled_error(fd_directional(f, 0.0, 1.0), analytic);
}

DenseMatrix as_matrix(double v) { return DenseMatrix::Constant(1, 1, v); }

// ---- per-group checks ----

void group_mul(Context& c) {
  c.identity("mul", tol::kIdentityMultiply);
  c.run("fd/mul_tangent", 50, tol::kFdTangent, [](Rng& rng) {
    const double a = rng.uniform(), x = rng.uniform(), a_t = rng.uniform(), x_t = rng.uniform();
    const double fd = fd_directional([&](double t) { return (a + t * a_t) * (x + t * x_t); }, 0.0, 1.0);
    return scaled_error(fd, mul_tangent(a, x, a_t, x_t));
  });
}

void group_dot(Context& c) {
  c.identity("dot", tol::kIdentityMultiply);
  const Index d = c.dim(16);
  c.run("fd/dot_tangent", 50, tol::kFdTangent, [d](Rng& rng) {
    const Index n = rng.integer(1, d);
    const DenseVector a = rng.vector(n), x = rng.vector(n), a_t = rng.vector(n), x_t = rng.vector(n);
    return tangent_error_fd(
        [&](double t) { return as_matrix(dot(a + t * a_t, x + t * x_t)); },
        as_matrix(dot_tangent(a, x, a_t, x_t)));
  });
}

void group_gemv(Context& c) {
  c.identity("gemv", tol::kIdentityMultiply);
  const Index d = c.dim(16);
  c.run("fd/gemv_tangent", 50, tol::kFdTangent, [d](Rng& rng) {
    const Index m = rng.integer(1, d), n = rng.integer(1, d);
    const DenseMatrix A = rng.matrix(m, n), A_t = rng.matrix(m, n);
    const DenseVector x = rng.vector(n), x_t = rng.vector(n);
    return tangent_error_fd([&](double t) { return DenseMatrix(gemv(A + t * A_t, x + t * x_t)); },
                            gemv_tangent(A, x, A_t, x_t));
  });
}

void group_gemm(Context& c) {
  c.identity("gemm", tol::kIdentityMultiply);
  const Index d = c.dim(16);
  c.run("fd/gemm_tangent", 50, tol::kFdTangent, [d](Rng& rng) {
    const Index m = rng.integer(1, d), n = rng.integer(1, d), p = rng.integer(1, d);
    const DenseMatrix A = rng.matrix(m, n), A_t = rng.matrix(m, n);
    const DenseMatrix X = rng.matrix(n, p), X_t = rng.matrix(n, p);
    return tangent_error_fd([&](double t) { return gemm(A + t * A_t, X + t * X_t); },
                            gemm_tangent(A, X, A_t, X_t));
  });
}

void group_sandwich(Context& c) {
  c.identity("sandwich", tol::kIdentityMultiply);
  const Index d = c.dim(16);
  c.run("fd/sandwich_tangent", 50, tol::kFdTangent, [d](Rng& rng) {
    const Index m = rng.integer(1, d), n = rng.integer(1, d), q = rng.integer(1, d),
                p = rng.integer(1, d);
    const DenseMatrix A = rng.matrix(m, n), B = rng.matrix(q, p);
    const DenseMatrix X = rng.matrix(n, q), X_t = rng.matrix(n, q);
    return tangent_error_fd([&](double t) { return gemm(gemm(A, X + t * X_t), B); },
                            sandwich_tangent(A, X_t, B));
  });
}

void group_sum_sandwich(Context& c) {
  c.identity("sum_sandwich", tol::kIdentityMultiply);
  const Index d = c.dim(6);
  // Per-term FD of the functional <Y_adj, sum_i A_i X_i B_i> against X_i_adj.
  c.run("fd/sum_sandwich_adjoint", 20, tol::kFdSumSandwich, [d](Rng& rng) {
    const Index m = rng.integer(1, d), p = rng.integer(1, d);
    std::vector<SandwichTerm<double>> terms;
    std::vector<DenseMatrix> X;
    for (int i = 0; i < 3; ++i) {
      const Index n = rng.integer(1, d), q = rng.integer(1, d);
      terms.push_back({rng.matrix(m, n), rng.matrix(q, p), n, q});
      X.push_back(rng.matrix(n, q));
    }
    const DenseMatrix Y_adj = rng.matrix(m, p);
    const auto adj = sum_sandwich_adjoint(terms, Y_adj);
    double worst = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      for (Index r = 0; r < X[i].rows(); ++r) {
        for (Index col = 0; col < X[i].cols(); ++col) {
          auto J = [&](double t) {
            DenseMatrix Y = DenseMatrix::Zero(m, p);
            for (std::size_t j = 0; j < terms.size(); ++j) {
              DenseMatrix Xj = X[j];
              if (j == i) Xj(r, col) += t;
              Y += terms[j].A * Xj * terms[j].B;
            }
            return (Y.array() * Y_adj.array()).sum();
          };
          worst = std::max(worst, scaled_error(fd_directional(J, 0.0, 1.0), adj[i](r, col)));
        }
      }
    }
    return worst;
  });
}

void group_solve(Context& c) {
  c.identity("solve", tol::kIdentitySolve);
  const Index d16 = c.dim(16);
  c.run("fd/solve_tangent", 50, tol::kFdTangent, [d16](Rng& rng) {
    const Index n = rng.integer(1, d16);
    const DenseMatrix A = rng.well_conditioned(n), A_t = rng.matrix(n, n);
    const DenseVector b = rng.vector(n), b_t = rng.vector(n);
    const auto F = lu_factor(A);
    const DenseVector x = lu_solve(F, b);
    return tangent_error_fd(
        [&](double t) { return DenseMatrix(lu_solve(lu_factor(A + t * A_t), b + t * b_t)); },
        solve_tangent(F, x, A_t, b_t));
  });

  const Index d8 = c.dim(8);
  // Entrywise FD of J(A, b) = <x_adj, A^-1 b>.
  c.run("fd/solve_adjoint", 20, tol::kFdSolveAdjoint, [d8](Rng& rng) {
    const Index n = d8;
    const DenseMatrix A = rng.well_conditioned(n);
    const DenseVector b = rng.vector(n), x_adj = rng.vector(n);
    const auto F = lu_factor(A);
    const DenseVector x = lu_solve(F, b);
    const auto adj = solve_adjoint(F, x, x_adj);
    auto J = [&](const DenseMatrix& AA, const DenseVector& bb) {
      return x_adj.dot(lu_solve(lu_factor(AA), bb));
    };
    double worst = 0.0;
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) {
        const double fd = fd_directional(
            [&](double t) {
              DenseMatrix AA = A;
              AA(i, j) += t;
              return J(AA, b);
            },
            0.0, 1.0);
        worst = std::max(worst, scaled_error(fd, adj.A_adj(i, j)));
      }
    }
    for (Index i = 0; i < n; ++i) {
      const double fd = fd_directional(
          [&](double t) {
            DenseVector bb = b;
            bb(i) += t;
            return J(A, bb);
          },
          0.0, 1.0);
      worst = std::max(worst, scaled_error(fd, adj.b_adj(i)));
    }
    return worst;
  });

  c.run("oracle/solve_adjoint", 20, tol::kOracle, [d8](Rng& rng) {
    const Index n = d8;
    Tape tape;
    const auto A = tape.record_input(Value(rng.well_conditioned(n)), Activity::active);
    const auto b = tape.record_input(Value(rng.vector(n)), Activity::active);
    const auto x = tape.solve(A, b);
    const DenseVector x_adj = rng.vector(n);
    const auto rule = solve_adjoint(*tape.node(x).factorization, tape.primal(x).vector(), x_adj);
    const auto oracle = scalar_oracle_adjoint(tape, x, Value(x_adj));
    return std::max(relative_error(rule.A_adj, oracle.adjoint(A)),
                    relative_error(DenseMatrix(rule.b_adj), oracle.adjoint(b)));
  });
}

void group_second_order(Context& c) {
  const Index d = c.dim(6);
  FlopCounter factor_counter;
  c.run("fd/second_order_adjoint", 10, tol::kFdSecondOrder, [d, &factor_counter](Rng& rng) {
    const Index n = d;
    const DenseMatrix A = rng.well_conditioned(n), A_dot = rng.matrix(n, n);
    const DenseVector b = rng.vector(n), b_dot = rng.vector(n);
    const DenseVector x_adj = rng.vector(n), x_adj_dot = rng.vector(n);
    const auto F = lu_factor(A);
    const DenseVector x = lu_solve(F, b);

    SolveSecondOrderAdjoint<double> so;
    {
      ScopedFlopCounter scope(factor_counter);
      so = solve_second_order_adjoint(F, x, x_adj, A_dot, b_dot, x_adj_dot);
    }
    DenseVector analytic(n + n * n);
    analytic << so.b_adj_dot, so.A_adj_dot.reshaped();

    auto g = [&](double t) {
      const DenseMatrix At = A + t * A_dot;
      const auto Ft = lu_factor(At);
      const DenseVector xt = lu_solve(Ft, b + t * b_dot);
      const auto adj = solve_adjoint(Ft, xt, x_adj + t * x_adj_dot);
      DenseVector out(n + n * n);
      out << adj.b_adj, adj.A_adj.reshaped();
      return out;
    };
    return scaled_error(fd_directional(g, 0.0, 1.0), analytic);
  });
  const std::uint64_t trials = c.trials(10);
  c.out.push_back(make_report("flops/second_order_factorizations",
                              static_cast<double>(factor_counter.factor_flops()),
                              c.tolerance("flops/second_order_factorizations", 0.0), trials,
                              c.cfg.seed));
}

void group_tape(Context& c) {
  const Index d = c.dim(8);
  c.run("oracle/tape", 25, tol::kOracle, [d](Rng& rng) {
    ProgramOptions opts;
    opts.max_dim = d;
    opts.max_depth = 6;
    const RandomProgram p = random_program(rng, opts);
    if (!p.has_fan_out || !p.has_solve || p.depth > opts.max_depth) return std::numeric_limits<double>::infinity();
    const AdjointStore store = p.tape.reverse(p.output, p.seed);
    const OracleAdjoints oracle = scalar_oracle_adjoint(p.tape, p.output, p.seed);
    // Adjoints that cancel exactly (A feeding both a solve and a product with
    // its solution) are pure roundoff, so the denominator is floored at a
    // fraction of the largest adjoint in the program.
    double largest = 0.0;
    for (std::size_t i = 0; i < p.tape.size(); ++i) {
      if (oracle.has(i)) largest = std::max(largest, oracle.adjoint(p.tape.handle(i)).cwiseAbs().maxCoeff());
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < p.tape.size(); ++i) {
      const NodeHandle h = p.tape.handle(i);
      if (!h.active()) continue;
      worst = std::max(worst, scaled_error(store.adjoint(h).data(), oracle.adjoint(h), 1e-3 * largest));
    }
    return worst;
  });
}

void group_reuse(Context& c) {
  BenchConfig bc;
  bc.sizes = {64, 128, 256};
  bc.adjoint_count = 16;
  bc.seed = c.cfg.seed;
  const auto records = run_bench(bc);
  const auto e = fit_bench_exponents(records);
  const std::uint64_t n = bc.sizes.size();
  c.out.push_back(make_report("flops/factor_exponent", std::abs(e.factor - 3.0),
                              c.tolerance("flops/factor_exponent", tol::kFactorExponent), n,
                              c.cfg.seed));
  c.out.push_back(make_report("flops/adjoint_solve_exponent", std::abs(e.reused_adjoint_solve - 2.0),
                              c.tolerance("flops/adjoint_solve_exponent", tol::kSolveExponent), n,
                              c.cfg.seed));
  // With reuse the factor count must be exactly one factorization per size.
  double excess = 0.0;
  for (const auto& r : records) {
    if (!r.reuse) continue;
    const double one = static_cast<double>(flops::lu_factor(static_cast<std::uint64_t>(r.n)));
    excess = std::max(excess, std::abs(static_cast<double>(r.factor_flops) / one - 1.0));
  }
  c.out.push_back(make_report("flops/reuse_single_factorization", excess,
                              c.tolerance("flops/reuse_single_factorization", 0.0), n, c.cfg.seed));
}

void group_collapse(Context& c) {
  c.run("collapse/level", 100, tol::kLevelCollapse, [](Rng& rng) {
    const double a = rng.uniform(), x = rng.uniform(), y_adj = rng.uniform();
    const auto ref = mul_adjoint(a, x, y_adj);
    const DenseVector av = DenseVector::Constant(1, a), xv = DenseVector::Constant(1, x);
    const DenseMatrix Am = DenseMatrix::Constant(1, 1, a), Xm = DenseMatrix::Constant(1, 1, x);
    const auto d = dot_adjoint(av, xv, y_adj);
    const auto v = gemv_adjoint(Am, xv, DenseVector::Constant(1, y_adj));
    const auto g = gemm_adjoint(Am, Xm, DenseMatrix::Constant(1, 1, y_adj));
    return std::max({std::abs(d.a_adj(0) - ref.a_adj), std::abs(d.x_adj(0) - ref.x_adj),
                     std::abs(v.A_adj(0, 0) - ref.a_adj), std::abs(v.x_adj(0) - ref.x_adj),
                     std::abs(g.A_adj(0, 0) - ref.a_adj), std::abs(g.X_adj(0, 0) - ref.x_adj)});
  });
}

using Group = void (*)(Context&);

Group find_group(const std::string& name) {
  if (name == "mul") return group_mul;
  if (name == "dot") return group_dot;
  if (name == "gemv") return group_gemv;
  if (name == "gemm") return group_gemm;
  if (name == "sandwich") return group_sandwich;
  if (name == "sum_sandwich" || name == "sum-sandwich") return group_sum_sandwich;
  if (name == "solve") return group_solve;
  if (name == "second_order") return group_second_order;
  if (name == "tape") return group_tape;
  if (name == "reuse") return group_reuse;
  if (name == "collapse") return group_collapse;
  return nullptr;
}

}  // namespace

std::vector<VerificationReport> run_suite(const SuiteConfig& config) {
  if (config.checks.empty()) throw Error("run_suite: empty check set");
  std::vector<Group> groups;
  for (const auto& name : config.checks) {
    const Group g = find_group(name);
    if (g == nullptr) throw Error("unknown check: " + name);
    if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
  }
  if (config.trials && *config.trials < 1) throw Error("run_suite: trials must be at least 1");
  std::vector<VerificationReport> out;
  Context ctx{config, out};
  for (Group g : groups) g(ctx);
  return out;
}

}  // namespace adjblas::verify
