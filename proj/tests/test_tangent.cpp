#include <doctest.h>

#include "adjblas/blas.hpp"
#include "adjblas/tangent.hpp"
#include "adjblas/verify/fd.hpp"
#include "adjblas/verify/random.hpp"

using namespace adjblas;
using verify::fd_directional;
using verify::relative_error;
using verify::Rng;
using verify::scaled_error;

namespace {

DenseVector vec2(double a, double b) { return DenseVector{{a, b}}; }

DenseMatrix diag2(double a, double b) { return DenseVector{{a, b}}.asDiagonal(); }

}  // namespace

TEST_CASE("mul_tangent") {
  CHECK(mul_tangent(2.0, 3.0, 1.0, 0.0) == 3.0);
  CHECK(mul_tangent(2.0, 3.0, 0.0, 1.0) == 2.0);
  CHECK(mul_tangent(2.0, 3.0, 0.5, -1.0) == doctest::Approx(-0.5));
}

TEST_CASE("dot_tangent") {
  CHECK(dot_tangent(vec2(1, 2), vec2(3, 4), vec2(1, 0), vec2(0, 0)) == 3.0);

  Rng rng(21);
  const DenseVector a = rng.vector(6), x = rng.vector(6);
  // Along the point itself a bilinear form doubles.
  CHECK(dot_tangent(a, x, a, x) == doctest::Approx(2.0 * dot(a, x)).epsilon(1e-14));
  CHECK(dot_tangent(a, x, x, a) == doctest::Approx(dot(x, x) + dot(a, a)).epsilon(1e-14));

  SUBCASE("finite differences, n = 16") {
    for (int t = 0; t < 10; ++t) {
      const DenseVector a = rng.vector(16), x = rng.vector(16);
      const DenseVector a_t = rng.vector(16), x_t = rng.vector(16);
      auto f = [&](double s) { return dot(a + s * a_t, x + s * x_t); };
      CHECK(scaled_error(fd_directional(f, 0.0, 1.0), dot_tangent(a, x, a_t, x_t)) <= 1e-7);
    }
  }
  CHECK_THROWS_AS(dot_tangent(vec2(1, 2), vec2(3, 4), DenseVector::Ones(3), vec2(0, 0)), DimensionError);
}

TEST_CASE("gemv_tangent") {
  Rng rng(22);
  const DenseMatrix A = rng.matrix(3, 4);
  const DenseVector x = rng.vector(4), x_t = rng.vector(4);
  CHECK(gemv_tangent(A, x, DenseMatrix::Zero(3, 4), x_t) == gemv(A, x_t));

  const DenseMatrix S = rng.matrix(4, 4);
  CHECK(gemv_tangent(S, x, DenseMatrix::Identity(4, 4), DenseVector::Zero(4)) == x);

  SUBCASE("finite differences, 8x5") {
    for (int t = 0; t < 10; ++t) {
      const DenseMatrix B = rng.matrix(8, 5), B_t = rng.matrix(8, 5);
      const DenseVector v = rng.vector(5), v_t = rng.vector(5);
      auto f = [&](double s) { return gemv(B + s * B_t, v + s * v_t); };
      CHECK(scaled_error(fd_directional(f, 0.0, 1.0), gemv_tangent(B, v, B_t, v_t)) <= 1e-7);
    }
  }
  CHECK_THROWS_AS(gemv_tangent(A, x, DenseMatrix::Zero(4, 3), x_t), DimensionError);
}

TEST_CASE("gemm_tangent") {
  Rng rng(23);
  const DenseMatrix I = DenseMatrix::Identity(3, 3);
  const DenseMatrix A_t = rng.matrix(3, 3), X_t = rng.matrix(3, 3);
  CHECK((gemm_tangent(I, I, A_t, X_t) - (A_t + X_t)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(gemm_tangent(rng.matrix(2, 3), rng.matrix(3, 4), DenseMatrix::Zero(2, 3),
                     DenseMatrix::Zero(3, 4)) == DenseMatrix::Zero(2, 4));

  SUBCASE("finite differences, 4x3 times 3x6") {
    for (int t = 0; t < 10; ++t) {
      const DenseMatrix A = rng.matrix(4, 3), At = rng.matrix(4, 3);
      const DenseMatrix X = rng.matrix(3, 6), Xt = rng.matrix(3, 6);
      auto f = [&](double s) { return gemm(A + s * At, X + s * Xt); };
      CHECK(scaled_error(fd_directional(f, 0.0, 1.0), gemm_tangent(A, X, At, Xt)) <= 1e-7);
    }
  }

  SUBCASE("one column agrees with gemv_tangent") {
    const DenseMatrix A = rng.matrix(5, 4), At = rng.matrix(5, 4);
    const DenseMatrix X = rng.matrix(4, 1), Xt = rng.matrix(4, 1);
    const DenseMatrix Y = gemm_tangent(A, X, At, Xt);
    const DenseVector y = gemv_tangent(A, DenseVector(X.col(0)), At, DenseVector(Xt.col(0)));
    CHECK((Y.col(0) - y).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("pair overload") {
    const DenseMatrix A = rng.matrix(2, 3), X = rng.matrix(3, 2);
    const DenseMatrix At = rng.matrix(2, 3), Xt = rng.matrix(3, 2);
    const auto Y = gemm_tangent(make_tangent_pair(A, At), make_tangent_pair(X, Xt));
    CHECK(Y.value == gemm(A, X));
    CHECK(Y.tangent == gemm_tangent(A, X, At, Xt));
    CHECK_THROWS_AS(make_tangent_pair(A, X), DimensionError);
  }
}

TEST_CASE("sandwich_tangent") {
  Rng rng(24);
  const DenseMatrix X_t = rng.matrix(3, 3);
  CHECK(sandwich_tangent(DenseMatrix::Identity(3, 3), X_t, DenseMatrix::Identity(3, 3)) == X_t);
  CHECK(sandwich_tangent(rng.matrix(2, 3), DenseMatrix::Zero(3, 4), rng.matrix(4, 2)) ==
        DenseMatrix::Zero(2, 2));

  SUBCASE("finite differences, m=3 n=4 q=2 p=5") {
    const DenseMatrix A = rng.matrix(3, 4), B = rng.matrix(2, 5);
    const DenseMatrix X = rng.matrix(4, 2), Xt = rng.matrix(4, 2);
    auto f = [&](double s) { return gemm(gemm(A, X + s * Xt), B); };
    CHECK(scaled_error(fd_directional(f, 0.0, 1.0), sandwich_tangent(A, Xt, B)) <= 1e-7);
  }
}

TEST_CASE("solve_tangent") {
  {
    const auto F = lu_factor(DenseMatrix::Identity(2, 2));
    const DenseVector x = lu_solve(F, vec2(3, 4));
    CHECK(solve_tangent(F, x, DenseMatrix::Zero(2, 2), vec2(1, 2)) == vec2(1, 2));
  }
  {
    const DenseMatrix A = diag2(2, 4);
    const auto F = lu_factor(A);
    const DenseVector x = vec2(1, 1);
    CHECK(solve_tangent(F, x, A, vec2(0, 0)) == vec2(-1, -1));
  }

  Rng rng(25);
  SUBCASE("finite differences, well-conditioned 8x8") {
    for (int t = 0; t < 10; ++t) {
      const DenseMatrix A = rng.well_conditioned(8), At = rng.matrix(8, 8);
      const DenseVector b = rng.vector(8), bt = rng.vector(8);
      const auto F = lu_factor(A);
      const DenseVector x = lu_solve(F, b);
      auto f = [&](double s) { return DenseVector(lu_solve(lu_factor(A + s * At), b + s * bt)); };
      CHECK(scaled_error(fd_directional(f, 0.0, 1.0), solve_tangent(F, x, At, bt)) <= 1e-6);
    }
  }

  SUBCASE("satisfies the tangent system") {
    const DenseMatrix A = rng.well_conditioned(7), At = rng.matrix(7, 7);
    const DenseVector b = rng.vector(7), bt = rng.vector(7);
    const auto F = lu_factor(A);
    const DenseVector x = lu_solve(F, b);
    const DenseVector xt = solve_tangent(F, x, At, bt);
    CHECK(relative_error(gemv(A, xt) + gemv(At, x), bt) <= 1e-10);
  }

  SUBCASE("never refactors") {
    const DenseMatrix A = rng.well_conditioned(5);
    const auto F = lu_factor(A);
    const DenseVector x = lu_solve(F, rng.vector(5));
    FlopCounter c;
    ScopedFlopCounter scope(c);
    for (int k = 0; k < 4; ++k) solve_tangent(F, x, rng.matrix(5, 5), rng.vector(5));
    CHECK(c.factor_flops() == 0);
    CHECK(c.solve_flops() == 4 * flops::lu_solve(5));
  }
}

TEST_CASE("tangent rules are linear in the tangents") {
  Rng rng(26);
  const double alpha = rng.uniform(-3, 3);
  auto close = [](const auto& lhs, const auto& rhs) { return relative_error(lhs, rhs) <= 1e-13; };

  const DenseMatrix A = rng.matrix(4, 5);
  const DenseVector x = rng.vector(5);
  const DenseMatrix A1 = rng.matrix(4, 5), A2 = rng.matrix(4, 5);
  const DenseVector x1 = rng.vector(5), x2 = rng.vector(5);
  CHECK(close(gemv_tangent(A, x, A1 + A2, x1 + x2), gemv_tangent(A, x, A1, x1) + gemv_tangent(A, x, A2, x2)));
  CHECK(close(gemv_tangent(A, x, alpha * A1, alpha * x1), alpha * gemv_tangent(A, x, A1, x1)));

  const DenseMatrix X = rng.matrix(5, 3), X1 = rng.matrix(5, 3), X2 = rng.matrix(5, 3);
  CHECK(close(gemm_tangent(A, X, A1 + A2, X1 + X2), gemm_tangent(A, X, A1, X1) + gemm_tangent(A, X, A2, X2)));
  CHECK(close(gemm_tangent(A, X, alpha * A1, alpha * X1), alpha * gemm_tangent(A, X, A1, X1)));

  const DenseMatrix B = rng.matrix(3, 2);
  CHECK(close(sandwich_tangent(A, X1 + X2, B), sandwich_tangent(A, X1, B) + sandwich_tangent(A, X2, B)));
  CHECK(close(sandwich_tangent(A, alpha * X1, B), alpha * sandwich_tangent(A, X1, B)));

  const DenseVector a = rng.vector(5);
  const double d12 = dot_tangent(a, x, x1 + x2, x2 - x1);
  CHECK(d12 == doctest::Approx(dot_tangent(a, x, x1, -x1) + dot_tangent(a, x, x2, x2)).epsilon(1e-13));

  const DenseMatrix S = rng.well_conditioned(5), S1 = rng.matrix(5, 5), S2 = rng.matrix(5, 5);
  const auto F = lu_factor(S);
  const DenseVector sx = lu_solve(F, x);
  CHECK(close(solve_tangent(F, sx, S1 + S2, x1 + x2),
              solve_tangent(F, sx, S1, x1) + solve_tangent(F, sx, S2, x2)));
  CHECK(close(solve_tangent(F, sx, alpha * S1, alpha * x1), alpha * solve_tangent(F, sx, S1, x1)));
}
