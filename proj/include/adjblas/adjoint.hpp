#ifndef ADJBLAS_ADJOINT_HPP
#define ADJBLAS_ADJOINT_HPP

// Reverse-mode rules for BLAS-level elementals and the linear solve.
//
// All rules return fresh adjoints (assignment semantics). Accumulation into
// shared buffers is left to the caller, see tape.hpp. Passive operands (the
// outer factors of sandwich products) receive no adjoint at all.

#include <Eigen/Core>

#include <string>
#include <vector>

#include "adjblas/blas.hpp"
#include "adjblas/lu.hpp"
#include "adjblas/tangent.hpp"
#include "adjblas/types.hpp"

namespace adjblas {

struct MulAdjoint {
  double a_adj;
  double x_adj;
};

template <typename Scalar>
struct DotAdjoint {
  Vector<Scalar> a_adj;
  Vector<Scalar> x_adj;
};

template <typename Scalar>
struct GemvAdjoint {
  Matrix<Scalar> A_adj;
  Vector<Scalar> x_adj;
};

template <typename Scalar>
struct GemmAdjoint {
  Matrix<Scalar> A_adj;
  Matrix<Scalar> X_adj;
};

template <typename Scalar>
struct SolveAdjoint {
  Vector<Scalar> b_adj;
  Matrix<Scalar> A_adj;
};

template <typename Scalar>
struct SolveSecondOrderAdjoint {
  Vector<Scalar> b_adj_dot;
  Matrix<Scalar> A_adj_dot;
};

/// One term A_i X_i B_i of a sum of sandwich products. A_i and B_i are passive;
/// only the shape of the active X_i is recorded.
template <typename Scalar>
struct SandwichTerm {
  Matrix<Scalar> A;
  Matrix<Scalar> B;
  Index x_rows = 0;
  Index x_cols = 0;
};

/// y = a x  =>  a_adj = x y_adj, x_adj = a y_adj.
inline MulAdjoint mul_adjoint(double a, double x, double y_adj) {
  flop_counter().add_multiply(2);
  return {x * y_adj, a * y_adj};
}

/// y = <a, x>  =>  a_adj = x y_adj, x_adj = a y_adj.
template <typename DA, typename DX>
DotAdjoint<typename DA::Scalar> dot_adjoint(const Eigen::MatrixBase<DA>& a,
                                            const Eigen::MatrixBase<DX>& x,
                                            typename DA::Scalar y_adj) {
  detail::require_vector(a, "dot_adjoint");
  detail::require_vector(x, "dot_adjoint");
  if (a.rows() != x.rows()) {
    throw DimensionError("dot_adjoint: length mismatch " + std::to_string(a.rows()) + " vs " +
                         std::to_string(x.rows()));
  }
  flop_counter().add_multiply(2 * static_cast<std::uint64_t>(a.rows()));
  return {x * y_adj, a * y_adj};
}

/// y = A x  =>  x_adj = A^T y_adj, A_adj = y_adj x^T.
template <typename DA, typename DX, typename DY>
GemvAdjoint<typename DA::Scalar> gemv_adjoint(const Eigen::MatrixBase<DA>& A,
                                              const Eigen::MatrixBase<DX>& x,
                                              const Eigen::MatrixBase<DY>& y_adj) {
  detail::require_vector(x, "gemv_adjoint");
  detail::require_vector(y_adj, "gemv_adjoint");
  if (y_adj.rows() != A.rows() || x.rows() != A.cols()) {
    throw DimensionError("gemv_adjoint: matrix " + shape_string(A) + ", x of length " +
                         std::to_string(x.rows()) + ", y_adj of length " +
                         std::to_string(y_adj.rows()));
  }
  return {outer(y_adj, x), gemv(A.transpose(), y_adj)};
}

/// Y = A X  =>  A_adj = Y_adj X^T, X_adj = A^T Y_adj.
template <typename DA, typename DX, typename DY>
GemmAdjoint<typename DA::Scalar> gemm_adjoint(const Eigen::MatrixBase<DA>& A,
                                              const Eigen::MatrixBase<DX>& X,
                                              const Eigen::MatrixBase<DY>& Y_adj) {
  if (A.cols() != X.rows() || Y_adj.rows() != A.rows() || Y_adj.cols() != X.cols()) {
    throw DimensionError("gemm_adjoint: A " + shape_string(A) + ", X " + shape_string(X) +
                         ", Y_adj " + shape_string(Y_adj));
  }
  return {gemm(Y_adj, X.transpose()), gemm(A.transpose(), Y_adj)};
}

/// Y = A X B with passive A, B  =>  X_adj = A^T Y_adj B^T.
template <typename DA, typename DB, typename DY>
Matrix<typename DA::Scalar> sandwich_adjoint(const Eigen::MatrixBase<DA>& A,
                                             const Eigen::MatrixBase<DB>& B,
                                             const Eigen::MatrixBase<DY>& Y_adj) {
  if (Y_adj.rows() != A.rows() || Y_adj.cols() != B.cols()) {
    throw DimensionError("sandwich_adjoint: A " + shape_string(A) + ", B " + shape_string(B) +
                         ", Y_adj " + shape_string(Y_adj));
  }
  return gemm(gemm(A.transpose(), Y_adj), B.transpose());
}

/// Y = sum_i A_i X_i B_i. Each term sees the same Y_adj, since the Jacobian of
/// the sum with respect to every summand is the identity.
template <typename Scalar, typename DY>
std::vector<Matrix<Scalar>> sum_sandwich_adjoint(const std::vector<SandwichTerm<Scalar>>& terms,
                                                 const Eigen::MatrixBase<DY>& Y_adj) {
  if (terms.empty()) throw DimensionError("sum_sandwich_adjoint: empty term list");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    if (t.A.rows() != Y_adj.rows() || t.B.cols() != Y_adj.cols() || t.A.cols() != t.x_rows ||
        t.B.rows() != t.x_cols) {
      throw DimensionError("sum_sandwich_adjoint: term " + std::to_string(i) + " has A " +
                           shape_string(t.A) + ", X " + shape_string(t.x_rows, t.x_cols) +
                           ", B " + shape_string(t.B) + " against Y_adj " +
                           shape_string(Y_adj));
    }
  }
  std::vector<Matrix<Scalar>> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(sandwich_adjoint(t.A, t.B, Y_adj));
  return out;
}

/// Adjoint of x = A^-1 b at the primal solution x:
///   b_adj = A^-T x_adj
///   A_adj = -b_adj x^T
/// The transposed system is solved with the existing factorization.
template <typename Scalar, typename DX, typename DXA>
SolveAdjoint<Scalar> solve_adjoint(const LUFactorization<Scalar>& F,
                                   const Eigen::MatrixBase<DX>& x,
                                   const Eigen::MatrixBase<DXA>& x_adj) {
  const Index n = F.n();
  if (x.rows() != n || x.cols() != 1 || x_adj.rows() != n || x_adj.cols() != 1) {
    throw DimensionError("solve_adjoint: order " + std::to_string(n) + " with x " +
                         shape_string(x) + ", x_adj " + shape_string(x_adj));
  }
  SolveAdjoint<Scalar> out;
  out.b_adj = lu_solve_transposed(F, x_adj);
  out.A_adj = -outer(out.b_adj, x);
  return out;
}

/// Tangent of the solve adjoint map (x_adj, A, b) -> (b_adj, A_adj) along
/// (x_adj_dot, A_dot, b_dot). Three solves with the one factorization:
///   x_dot     = A^-1 (b_dot - A_dot x)
///   b_adj     = A^-T x_adj
///   b_adj_dot = A^-T (x_adj_dot - A_dot^T b_adj)
///   A_adj_dot = -(b_adj_dot x^T + b_adj x_dot^T)
template <typename Scalar, typename DX, typename DXA, typename DAD, typename DBD, typename DXAD>
SolveSecondOrderAdjoint<Scalar> solve_second_order_adjoint(
    const LUFactorization<Scalar>& F, const Eigen::MatrixBase<DX>& x,
    const Eigen::MatrixBase<DXA>& x_adj, const Eigen::MatrixBase<DAD>& A_dot,
    const Eigen::MatrixBase<DBD>& b_dot, const Eigen::MatrixBase<DXAD>& x_adj_dot) {
  const Index n = F.n();
  if (x_adj.rows() != n || x_adj.cols() != 1 || x_adj_dot.rows() != n ||
      x_adj_dot.cols() != 1) {
    throw DimensionError("solve_second_order_adjoint: order " + std::to_string(n) +
                         " with x_adj " + shape_string(x_adj) + ", x_adj_dot " +
                         shape_string(x_adj_dot));
  }
  const Vector<Scalar> x_dot = solve_tangent(F, x, A_dot, b_dot);
  const Vector<Scalar> b_adj = lu_solve_transposed(F, x_adj);
  Vector<Scalar> rhs = x_adj_dot;
  rhs -= gemv(A_dot.transpose(), b_adj);
  flop_counter().add_multiply(flops::axpy(n));

  SolveSecondOrderAdjoint<Scalar> out;
  out.b_adj_dot = lu_solve_transposed(F, rhs);
  out.A_adj_dot = outer(out.b_adj_dot, x);
  out.A_adj_dot += outer(b_adj, x_dot);
  out.A_adj_dot = -out.A_adj_dot;
  flop_counter().add_multiply(flops::axpy(static_cast<std::uint64_t>(n * n)));
  return out;
}

}  // namespace adjblas

#endif  // ADJBLAS_ADJOINT_HPP
