#include "adjblas/verify/identity.hpp"

#include <algorithm>
#include <cmath>

#include "adjblas/adjoint.hpp"
#include "adjblas/lu.hpp"
#include "adjblas/tangent.hpp"

namespace adjblas::verify {

namespace {

// Frobenius inner product.
double inner(const DenseMatrix& a, const DenseMatrix& b) { return (a.array() * b.array()).sum(); }

Dims draw(Rng& rng, const Dims& d) {
  if (!d.vary) return d;
  return {rng.integer(1, d.m), rng.integer(1, d.n), rng.integer(1, d.p),
          rng.integer(1, d.q), d.terms, false};
}

IdentitySides mul_trial(Rng& rng, const Dims&) {
  const double a = rng.uniform(), x = rng.uniform();
  const double a_t = rng.uniform(), x_t = rng.uniform();
  const double y_adj = rng.uniform();
  const double y_t = mul_tangent(a, x, a_t, x_t);
  const auto adj = mul_adjoint(a, x, y_adj);
  return {y_t * y_adj, a_t * adj.a_adj + x_t * adj.x_adj};
}

IdentitySides dot_trial(Rng& rng, const Dims& dims) {
  const Dims d = draw(rng, dims);
  const DenseVector a = rng.vector(d.n), x = rng.vector(d.n);
  const DenseVector a_t = rng.vector(d.n), x_t = rng.vector(d.n);
  const double y_adj = rng.uniform();
  const double y_t = dot_tangent(a, x, a_t, x_t);
  const auto adj = dot_adjoint(a, x, y_adj);
  return {y_t * y_adj, a_t.dot(adj.a_adj) + x_t.dot(adj.x_adj)};
}

IdentitySides gemv_trial(Rng& rng, const Dims& dims) {
  const Dims d = draw(rng, dims);
  const DenseMatrix A = rng.matrix(d.m, d.n), A_t = rng.matrix(d.m, d.n);
  const DenseVector x = rng.vector(d.n), x_t = rng.vector(d.n);
  const DenseVector y_adj = rng.vector(d.m);
  const DenseVector y_t = gemv_tangent(A, x, A_t, x_t);
  const auto adj = gemv_adjoint(A, x, y_adj);
  return {y_t.dot(y_adj), inner(A_t, adj.A_adj) + x_t.dot(adj.x_adj)};
}

IdentitySides gemm_trial(Rng& rng, const Dims& dims) {
  const Dims d = draw(rng, dims);
  const DenseMatrix A = rng.matrix(d.m, d.n), A_t = rng.matrix(d.m, d.n);
  const DenseMatrix X = rng.matrix(d.n, d.p), X_t = rng.matrix(d.n, d.p);
  const DenseMatrix Y_adj = rng.matrix(d.m, d.p);
  const DenseMatrix Y_t = gemm_tangent(A, X, A_t, X_t);
  const auto adj = gemm_adjoint(A, X, Y_adj);
  return {inner(Y_t, Y_adj), inner(A_t, adj.A_adj) + inner(X_t, adj.X_adj)};
}

IdentitySides sandwich_trial(Rng& rng, const Dims& dims) {
  const Dims d = draw(rng, dims);
  const DenseMatrix A = rng.matrix(d.m, d.n), B = rng.matrix(d.q, d.p);
  const DenseMatrix X_t = rng.matrix(d.n, d.q);
  const DenseMatrix Y_adj = rng.matrix(d.m, d.p);
  const DenseMatrix Y_t = sandwich_tangent(A, X_t, B);
  const DenseMatrix X_adj = sandwich_adjoint(A, B, Y_adj);
  return {inner(Y_t, Y_adj), inner(X_t, X_adj)};
}

IdentitySides sum_sandwich_trial(Rng& rng, const Dims& dims) {
  const Dims d = draw(rng, dims);
  const Index k = std::max<Index>(d.terms, 1);
  std::vector<SandwichTerm<double>> terms;
  std::vector<DenseMatrix> tangents;
  DenseMatrix Y_t = DenseMatrix::Zero(d.m, d.p);
  for (Index i = 0; i < k; ++i) {
    // Inner shapes differ per term; the output shape is shared.
    const Index ni = dims.vary ? rng.integer(1, dims.n) : d.n;
    const Index qi = dims.vary ? rng.integer(1, dims.q) : d.q;
    SandwichTerm<double> t{rng.matrix(d.m, ni), rng.matrix(qi, d.p), ni, qi};
    tangents.push_back(rng.matrix(ni, qi));
    Y_t += sandwich_tangent(t.A, tangents.back(), t.B);
    terms.push_back(std::move(t));
  }
  const DenseMatrix Y_adj = rng.matrix(d.m, d.p);
  const auto adjs = sum_sandwich_adjoint(terms, Y_adj);
  double rhs = 0.0;
  for (std::size_t i = 0; i < adjs.size(); ++i) rhs += inner(tangents[i], adjs[i]);
  return {inner(Y_t, Y_adj), rhs};
}

IdentitySides solve_trial(Rng& rng, const Dims& dims) {
  const Dims d = draw(rng, dims);
  const DenseMatrix A = rng.well_conditioned(d.n);
  const DenseVector b = rng.vector(d.n);
  const auto F = lu_factor(A);
  const DenseVector x = lu_solve(F, b);
  const DenseMatrix A_t = rng.matrix(d.n, d.n);
  const DenseVector b_t = rng.vector(d.n);
  const DenseVector x_adj = rng.vector(d.n);
  const DenseVector x_t = solve_tangent(F, x, A_t, b_t);
  const auto adj = solve_adjoint(F, x, x_adj);
  return {x_t.dot(x_adj), b_t.dot(adj.b_adj) + inner(A_t, adj.A_adj)};
}

}  // namespace

const std::vector<RulePair>& builtin_rule_pairs() {
  static const std::vector<RulePair> pairs = {
      {"mul", false, mul_trial},
      {"dot", false, dot_trial},
      {"gemv", false, gemv_trial},
      {"gemm", false, gemm_trial},
      {"sandwich", false, sandwich_trial},
      {"sum_sandwich", false, sum_sandwich_trial},
      {"solve", true, solve_trial},
  };
  return pairs;
}

const RulePair& find_rule_pair(const std::string& name) {
  const std::string key = name == "sum-sandwich" ? "sum_sandwich" : name;
  for (const auto& p : builtin_rule_pairs()) {
    if (p.name == key) return p;
  }
  throw Error("unknown rule pair: " + name);
}

double identity_residual(const IdentitySides& s) {
  const double scale = std::max({std::abs(s.lhs), std::abs(s.rhs), 1.0});
  return std::abs(s.lhs - s.rhs) / scale;
}

VerificationReport check_identity(const RulePair& pair, const Dims& dims, std::uint64_t trials,
                                  std::uint64_t seed, double tol) {
  if (trials < 1) throw Error("check_identity: trials must be at least 1");
  const std::string name = "identity/" + pair.name;
  Rng rng(derive_seed(seed, name));
  double worst = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const double r = identity_residual(pair.trial(rng, dims));
    if (std::isnan(r) || r > worst) worst = r;
    if (std::isnan(worst)) break;
  }
  return make_report(name, worst, tol, trials, seed);
}

VerificationReport check_identity(const std::string& pair_name, const Dims& dims,
                                  std::uint64_t trials, std::uint64_t seed, double tol) {
  return check_identity(find_rule_pair(pair_name), dims, trials, seed, tol);
}

}  // namespace adjblas::verify
