#ifndef ADJBLAS_BLAS_HPP
#define ADJBLAS_BLAS_HPP

// Passive BLAS-level products. Each call checks conformability, evaluates
// through Eigen and charges its closed-form flop count to flop_counter().

#include <Eigen/Core>

#include <string>

#include "adjblas/errors.hpp"
#include "adjblas/flops.hpp"
#include "adjblas/types.hpp"

namespace adjblas {

namespace detail {

template <typename Derived>
void require_vector(const Eigen::MatrixBase<Derived>& v, const char* op) {
  if (v.cols() != 1) {
    throw DimensionError(std::string(op) + ": expected a column vector, got " +
                         shape_string(v));
  }
}

}  // namespace detail

/// Inner product sum_i a_i x_i.
template <typename DA, typename DX>
typename DA::Scalar dot(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DX>& x) {
  detail::require_vector(a, "dot");
  detail::require_vector(x, "dot");
  if (a.rows() != x.rows()) {
    throw DimensionError("dot: length mismatch " + std::to_string(a.rows()) + " vs " +
                         std::to_string(x.rows()));
  }
  flop_counter().add_multiply(flops::dot(a.rows()));
  return a.dot(x);
}

/// y = A x.
template <typename DA, typename DX>
Vector<typename DA::Scalar> gemv(const Eigen::MatrixBase<DA>& A,
                                 const Eigen::MatrixBase<DX>& x) {
  detail::require_vector(x, "gemv");
  if (A.cols() != x.rows()) {
    throw DimensionError("gemv: matrix " + shape_string(A) + " times vector of length " +
                         std::to_string(x.rows()));
  }
  flop_counter().add_multiply(flops::gemv(A.rows(), A.cols()));
  Vector<typename DA::Scalar> y(A.rows());
  y.noalias() = A * x;
  return y;
}

/// Y = A X.
template <typename DA, typename DX>
Matrix<typename DA::Scalar> gemm(const Eigen::MatrixBase<DA>& A,
                                 const Eigen::MatrixBase<DX>& X) {
  if (A.cols() != X.rows()) {
    throw DimensionError("gemm: inner dimension mismatch " + shape_string(A) + " * " +
                         shape_string(X));
  }
  flop_counter().add_multiply(flops::gemm(A.rows(), A.cols(), X.cols()));
  Matrix<typename DA::Scalar> Y(A.rows(), X.cols());
  Y.noalias() = A * X;
  return Y;
}

/// Rank-1 product u v^T.
template <typename DU, typename DV>
Matrix<typename DU::Scalar> outer(const Eigen::MatrixBase<DU>& u,
                                  const Eigen::MatrixBase<DV>& v) {
  detail::require_vector(u, "outer");
  detail::require_vector(v, "outer");
  flop_counter().add_multiply(flops::outer(u.rows(), v.rows()));
  return u * v.transpose();
}

template <typename Derived>
Matrix<typename Derived::Scalar> transpose(const Eigen::MatrixBase<Derived>& M) {
  return M.transpose();
}

}  // namespace adjblas

#endif  // ADJBLAS_BLAS_HPP
