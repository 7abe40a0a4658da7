#ifndef ADJBLAS_TANGENT_HPP
#define ADJBLAS_TANGENT_HPP

// Forward-mode rules. Every tangent input is an explicit argument; a passive
// operand is expressed by passing a zero tangent (or by the rules that take
// no tangent for it, e.g. the sandwich product's outer factors).

#include <Eigen/Core>

#include <string>

#include "adjblas/blas.hpp"
#include "adjblas/lu.hpp"
#include "adjblas/types.hpp"

namespace adjblas {

/// d(a x) = x a_t + a x_t.
inline double mul_tangent(double a, double x, double a_t, double x_t) {
  flop_counter().add_multiply(3);
  return x * a_t + a * x_t;
}

/// d<a, x> = <x, a_t> + <a, x_t>.
template <typename DA, typename DX, typename DAT, typename DXT>
typename DA::Scalar dot_tangent(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DX>& x,
                                const Eigen::MatrixBase<DAT>& a_t,
                                const Eigen::MatrixBase<DXT>& x_t) {
  require_same_shape(a, a_t, "dot_tangent");
  require_same_shape(x, x_t, "dot_tangent");
  return dot(x, a_t) + dot(a, x_t);
}

/// d(A x) = A_t x + A x_t.
template <typename DA, typename DX, typename DAT, typename DXT>
Vector<typename DA::Scalar> gemv_tangent(const Eigen::MatrixBase<DA>& A,
                                         const Eigen::MatrixBase<DX>& x,
                                         const Eigen::MatrixBase<DAT>& A_t,
                                         const Eigen::MatrixBase<DXT>& x_t) {
  require_same_shape(A, A_t, "gemv_tangent");
  require_same_shape(x, x_t, "gemv_tangent");
  Vector<typename DA::Scalar> y_t = gemv(A_t, x);
  y_t += gemv(A, x_t);
  flop_counter().add_multiply(flops::axpy(y_t.size()));
  return y_t;
}

/// d(A X) = A_t X + A X_t.
template <typename DA, typename DX, typename DAT, typename DXT>
Matrix<typename DA::Scalar> gemm_tangent(const Eigen::MatrixBase<DA>& A,
                                         const Eigen::MatrixBase<DX>& X,
                                         const Eigen::MatrixBase<DAT>& A_t,
                                         const Eigen::MatrixBase<DXT>& X_t) {
  require_same_shape(A, A_t, "gemm_tangent");
  require_same_shape(X, X_t, "gemm_tangent");
  Matrix<typename DA::Scalar> Y_t = gemm(A_t, X);
  Y_t += gemm(A, X_t);
  flop_counter().add_multiply(flops::axpy(Y_t.size()));
  return Y_t;
}

template <typename Scalar>
TangentPair<Matrix<Scalar>> gemm_tangent(const TangentPair<Matrix<Scalar>>& A,
                                         const TangentPair<Matrix<Scalar>>& X) {
  return {gemm(A.value, X.value), gemm_tangent(A.value, X.value, A.tangent, X.tangent)};
}

/// Tangent of Y = A X B with passive A and B: A X_t B.
template <typename DA, typename DXT, typename DB>
Matrix<typename DA::Scalar> sandwich_tangent(const Eigen::MatrixBase<DA>& A,
                                             const Eigen::MatrixBase<DXT>& X_t,
                                             const Eigen::MatrixBase<DB>& B) {
  if (A.cols() != X_t.rows() || X_t.cols() != B.rows()) {
    throw DimensionError("sandwich_tangent: nonconformable " + shape_string(A) + " * " +
                         shape_string(X_t) + " * " + shape_string(B));
  }
  return gemm(gemm(A, X_t), B);
}

/// Tangent of x = A^-1 b at the primal solution x, using the factorization of A:
/// solves A x_t = b_t - A_t x. Never refactors.
template <typename Scalar, typename DX, typename DAT, typename DBT>
Vector<Scalar> solve_tangent(const LUFactorization<Scalar>& F, const Eigen::MatrixBase<DX>& x,
                             const Eigen::MatrixBase<DAT>& A_t,
                             const Eigen::MatrixBase<DBT>& b_t) {
  const Index n = F.n();
  if (x.rows() != n || x.cols() != 1 || A_t.rows() != n || A_t.cols() != n ||
      b_t.rows() != n || b_t.cols() != 1) {
    throw DimensionError("solve_tangent: order " + std::to_string(n) + " with x " +
                         shape_string(x) + ", A_t " + shape_string(A_t) + ", b_t " +
                         shape_string(b_t));
  }
  Vector<Scalar> rhs = b_t;
  rhs -= gemv(A_t, x);
  flop_counter().add_multiply(flops::axpy(n));
  return lu_solve(F, rhs);
}

}  // namespace adjblas

#endif  // ADJBLAS_TANGENT_HPP
