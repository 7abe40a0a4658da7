#include <doctest.h>

#include <thread>

#include "adjblas/adjoint.hpp"
#include "adjblas/blas.hpp"
#include "adjblas/tape.hpp"
#include "adjblas/verify/fd.hpp"
#include "adjblas/verify/random.hpp"

using namespace adjblas;
using verify::relative_error;
using verify::Rng;

namespace {

DenseVector vec2(double a, double b) { return DenseVector{{a, b}}; }

DenseMatrix mat2(double a, double b, double c, double d) {
  DenseMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

template <typename Fn>
std::string error_of(Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("tape_new") {
  Tape t = tape_new();
  CHECK(t.size() == 0);

  Tape u = tape_new();
  record_input(t, Value(1.0), Activity::active);
  CHECK(t.size() == 1);
  CHECK(u.size() == 0);
  CHECK(t.id() != u.id());

  Tape empty = tape_new();
  NodeHandle h;
  h.tape_id = empty.id();
  h.id = 0;
  h.activity = Activity::active;
  CHECK(contains(error_of([&] { reverse(empty, h, Value(1.0)); }), "unknown handle"));
}

TEST_CASE("record_input") {
  Tape t;
  const NodeHandle m = record_input(t, Value(mat2(1, 2, 3, 4)), Activity::active);
  CHECK(m.id == 0);
  CHECK(m.active());
  CHECK(m.shape == Shape{ValueKind::matrix, 2, 2});

  const NodeHandle s = record_input(t, Value(2.5), Activity::passive);
  CHECK_FALSE(s.active());
  CHECK(t.primal(s).scalar() == 2.5);

  CHECK(error_of([&] { record_input(t, Value(DenseVector(0)), Activity::active); }) == "empty value");
  CHECK(contains(error_of([&] { record_input(t, Value(std::nan("")), Activity::active); }), "non-finite"));
  CHECK(t.size() == 2);
}

TEST_CASE("record_op") {
  Tape t;
  const NodeHandle a = t.record_input(Value(DenseVector{{1, 2, 3}}), Activity::active);
  const NodeHandle x = t.record_input(Value(DenseVector{{4, 5, 6}}), Activity::active);
  const NodeHandle y = record_op(t, NodeKind::dot, {a, x});
  CHECK(y.shape.kind == ValueKind::scalar);
  CHECK(t.primal(y).scalar() == 32.0);
  CHECK(y.active());

  SUBCASE("solve stores primal and factorization") {
    const NodeHandle A = t.record_input(Value(DenseMatrix(DenseMatrix::Identity(2, 2))), Activity::active);
    const NodeHandle b = t.record_input(Value(vec2(3, 4)), Activity::active);
    const NodeHandle s = t.solve(A, b);
    CHECK(t.primal(s).vector() == vec2(3, 4));
    REQUIRE(t.node(s).factorization.has_value());
    CHECK(t.node(s).factorization->n() == 2);
  }

  SUBCASE("shape errors name both shapes") {
    const NodeHandle P = t.record_input(Value(DenseMatrix(DenseMatrix::Ones(2, 3))), Activity::active);
    const NodeHandle Q = t.record_input(Value(DenseMatrix(DenseMatrix::Ones(2, 2))), Activity::active);
    const std::string msg = error_of([&] { t.gemm(P, Q); });
    CHECK(contains(msg, "2x3"));
    CHECK(contains(msg, "2x2"));
    CHECK_THROWS_AS(t.dot(a, t.record_input(Value(vec2(1, 2)), Activity::active)), DimensionError);
  }

  SUBCASE("singular solve fails at record time") {
    const NodeHandle S = t.record_input(Value(mat2(1, 1, 1, 1)), Activity::active);
    const NodeHandle b = t.record_input(Value(vec2(1, 2)), Activity::active);
    CHECK_THROWS_AS(t.solve(S, b), SingularMatrixError);
  }

  SUBCASE("foreign handle") {
    Tape other;
    const NodeHandle z = other.record_input(Value(DenseVector{{1, 1, 1}}), Activity::active);
    CHECK(contains(error_of([&] { t.dot(a, z); }), "foreign handle"));
  }

  SUBCASE("arity") { CHECK_THROWS_AS(record_op(t, NodeKind::dot, {a}), TapeError); }

  SUBCASE("sandwich needs passive outer factors") {
    const NodeHandle L = t.record_input(Value(DenseMatrix(DenseMatrix::Ones(2, 2))), Activity::active);
    const NodeHandle X = t.record_input(Value(DenseMatrix(DenseMatrix::Ones(2, 2))), Activity::active);
    const NodeHandle R = t.record_input(Value(DenseMatrix(DenseMatrix::Ones(2, 2))), Activity::passive);
    CHECK_THROWS_AS(t.sandwich(L, X, R), TapeError);
  }

  SUBCASE("passive inputs give passive results") {
    const NodeHandle p = t.record_input(Value(DenseVector{{1, 1, 1}}), Activity::passive);
    const NodeHandle q = t.record_input(Value(DenseVector{{2, 2, 2}}), Activity::passive);
    CHECK_FALSE(t.dot(p, q).active());
    CHECK(t.dot(p, a).active());
  }
}

TEST_CASE("reverse") {
  SUBCASE("dot") {
    Tape t;
    const NodeHandle a = t.record_input(Value(DenseVector{{1, 2, 3}}), Activity::active);
    const NodeHandle x = t.record_input(Value(DenseVector{{4, 5, 6}}), Activity::active);
    const NodeHandle y = t.dot(a, x);
    const AdjointStore s = reverse(t, y, Value(1.0));
    CHECK(adjoint_of(s, a).vector() == DenseVector{{4, 5, 6}});
    CHECK(adjoint_of(s, x).vector() == DenseVector{{1, 2, 3}});
    CHECK(adjoint_of(s, y).scalar() == 1.0);
  }

  SUBCASE("fan-out accumulates over both slots") {
    Tape t;
    const NodeHandle x = t.record_input(Value(DenseVector{{1, -2, 3}}), Activity::active);
    const NodeHandle y = t.dot(x, x);
    const AdjointStore s = t.reverse(y, Value(1.0));
    CHECK(s.adjoint(x).vector() == DenseVector{{2, -4, 6}});
  }

  SUBCASE("solve") {
    Tape t;
    const NodeHandle A = t.record_input(Value(mat2(2, 0, 0, 4)), Activity::active);
    const NodeHandle b = t.record_input(Value(vec2(2, 4)), Activity::active);
    const NodeHandle x = t.solve(A, b);
    const AdjointStore s = t.reverse(x, Value(vec2(1, 1)));
    CHECK(s.adjoint(b).vector() == vec2(0.5, 0.25));
    CHECK(s.adjoint(A).matrix() == mat2(-0.5, -0.5, -0.25, -0.25));
  }

  SUBCASE("unused active input and passive input") {
    Tape t;
    const NodeHandle a = t.record_input(Value(vec2(1, 2)), Activity::active);
    const NodeHandle unused = t.record_input(Value(mat2(1, 2, 3, 4)), Activity::active);
    const NodeHandle c = t.record_input(Value(vec2(5, 6)), Activity::passive);
    const NodeHandle y = t.dot(a, c);
    const AdjointStore s = t.reverse(y, Value(1.0));
    CHECK(s.adjoint(unused).matrix() == DenseMatrix::Zero(2, 2));
    CHECK(s.adjoint(a).vector() == vec2(5, 6));
    CHECK(error_of([&] { s.adjoint(c); }) == "passive variable has no adjoint");
    CHECK_FALSE(s.has_buffer(c.id));
  }

  SUBCASE("seed errors") {
    Tape t;
    const NodeHandle p = t.record_input(Value(vec2(1, 2)), Activity::passive);
    const NodeHandle a = t.record_input(Value(vec2(1, 2)), Activity::active);
    CHECK_THROWS_AS(t.reverse(p, Value(vec2(1, 1))), TapeError);
    CHECK_THROWS_AS(t.reverse(a, Value(1.0)), DimensionError);
    Tape other;
    CHECK(contains(error_of([&] { other.reverse(a, Value(vec2(1, 1))); }), "foreign handle"));
  }

  SUBCASE("zero seed gives exact zeros") {
    Tape t;
    Rng rng(41);
    const NodeHandle A = t.record_input(Value(rng.well_conditioned(4)), Activity::active);
    const NodeHandle b = t.record_input(Value(rng.vector(4)), Activity::active);
    const NodeHandle x = t.solve(A, b);
    const NodeHandle y = t.dot(x, t.gemv(A, x));
    const AdjointStore s = t.reverse(y, Value(0.0));
    for (std::size_t i = 0; i < t.size(); ++i) {
      const NodeHandle h = t.handle(i);
      if (h.active()) CHECK(s.adjoint(h).data().cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("every node kind matches the rules") {
  Rng rng(42);
  Tape t;
  const NodeHandle A = t.record_input(Value(rng.matrix(3, 4)), Activity::active);
  const NodeHandle X = t.record_input(Value(rng.matrix(4, 2)), Activity::active);
  const NodeHandle Y = t.gemm(A, X);  // 3x2
  const NodeHandle L = t.record_input(Value(rng.matrix(2, 3)), Activity::passive);
  const NodeHandle R = t.record_input(Value(rng.matrix(2, 2)), Activity::passive);
  const NodeHandle S = t.sandwich(L, Y, R);  // 2x2
  const NodeHandle Z = t.add(S, t.scale(-1.5, S));
  const NodeHandle v = t.record_input(Value(rng.vector(2)), Activity::active);
  const NodeHandle w = t.gemv(Z, v);
  const NodeHandle k = t.record_input(Value(0.7), Activity::active);
  const NodeHandle out = t.mul(k, t.dot(w, v));

  const AdjointStore s = t.reverse(out, Value(1.0));

  // Replay the chain by hand with the rules.
  const DenseMatrix Am = t.primal(A).matrix(), Xm = t.primal(X).matrix();
  const DenseMatrix Zm = t.primal(Z).matrix();
  const DenseVector vv = t.primal(v).vector(), ww = t.primal(w).vector();
  const double kk = 0.7, d = dot(ww, vv);
  const auto m = mul_adjoint(kk, d, 1.0);
  CHECK(s.adjoint(k).scalar() == doctest::Approx(m.a_adj).epsilon(1e-14));
  const auto da = dot_adjoint(ww, vv, m.x_adj);
  const auto ga = gemv_adjoint(Zm, vv, da.a_adj);
  CHECK(relative_error(s.adjoint(v).vector(), da.x_adj + ga.x_adj) <= 1e-14);
  const DenseMatrix S_adj = ga.A_adj + (-1.5) * ga.A_adj;
  const DenseMatrix Y_adj = sandwich_adjoint(t.primal(L).matrix(), t.primal(R).matrix(), S_adj);
  const auto mm = gemm_adjoint(Am, Xm, Y_adj);
  CHECK(relative_error(s.adjoint(A).matrix(), mm.A_adj) <= 1e-14);
  CHECK(relative_error(s.adjoint(X).matrix(), mm.X_adj) <= 1e-14);
}

TEST_CASE("fan-out is the sum of the branches") {
  Rng rng(43);
  const DenseMatrix Am = rng.well_conditioned(5), Bm = rng.matrix(5, 5);
  const DenseVector xv = rng.vector(5), cv = rng.vector(5);

  // y = <c, solve(A, x)> + <c, B x>
  auto build = [&](Tape& t, bool f, bool g) {
    const NodeHandle x = t.record_input(Value(xv), Activity::active);
    const NodeHandle A = t.record_input(Value(Am), Activity::passive);
    const NodeHandle B = t.record_input(Value(Bm), Activity::passive);
    const NodeHandle c = t.record_input(Value(cv), Activity::passive);
    NodeHandle y;
    if (f && g) y = t.add(t.dot(c, t.solve(A, x)), t.dot(c, t.gemv(B, x)));
    else if (f) y = t.dot(c, t.solve(A, x));
    else y = t.dot(c, t.gemv(B, x));
    return std::pair{x, y};
  };
  Tape both, only_f, only_g;
  const auto [x, y] = build(both, true, true);
  const auto [xf, yf] = build(only_f, true, false);
  const auto [xg, yg] = build(only_g, false, true);
  const DenseVector total = both.reverse(y, Value(1.0)).adjoint(x).vector();
  const DenseVector split = only_f.reverse(yf, Value(1.0)).adjoint(xf).vector() +
                            only_g.reverse(yg, Value(1.0)).adjoint(xg).vector();
  CHECK(relative_error(total, split) <= 1e-13);
}

TEST_CASE("reversal reuses the recorded factorization") {
  Rng rng(44);
  Tape t;
  const NodeHandle A = t.record_input(Value(rng.well_conditioned(16)), Activity::active);
  const NodeHandle b = t.record_input(Value(rng.vector(16)), Activity::active);
  FlopCounter c;
  ScopedFlopCounter scope(c);
  const NodeHandle x = t.solve(A, b);
  const std::uint64_t after_record = c.factor_flops();
  CHECK(after_record == flops::lu_factor(16));
  for (int k = 0; k < 8; ++k) t.reverse(x, Value(rng.vector(16)));
  CHECK(c.factor_flops() == after_record);
  CHECK(c.solve_flops() == 9 * flops::lu_solve(16));
}

TEST_CASE("concurrent reverse sweeps") {
  Rng rng(45);
  Tape t;
  const NodeHandle A = t.record_input(Value(rng.well_conditioned(6)), Activity::active);
  const NodeHandle b = t.record_input(Value(rng.vector(6)), Activity::active);
  const NodeHandle y = t.dot(t.solve(A, b), b);
  const DenseMatrix want = t.reverse(y, Value(1.0)).adjoint(A).matrix();
  std::vector<DenseMatrix> got(4);
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < got.size(); ++i) {
    threads.emplace_back([&, i] { got[i] = t.reverse(y, Value(1.0)).adjoint(A).matrix(); });
  }
  for (auto& th : threads) th.join();
  for (const auto& g : got) CHECK(g == want);
}

TEST_CASE("dump") {
  Tape t;
  const NodeHandle A = t.record_input(Value(DenseMatrix(DenseMatrix::Identity(2, 2))), Activity::active);
  const NodeHandle b = t.record_input(Value(vec2(3, 4)), Activity::active);
  const NodeHandle x = t.solve(A, b);
  t.dot(x, b);
  CHECK(t.dump() ==
        "0 input matrix[2x2] -\n"
        "1 input vector[2] -\n"
        "2 solve vector[2] 0,1\n"
        "3 dot scalar 2,1\n");
}
