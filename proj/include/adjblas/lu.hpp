#ifndef ADJBLAS_LU_HPP
#define ADJBLAS_LU_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "adjblas/errors.hpp"
#include "adjblas/flops.hpp"
#include "adjblas/types.hpp"

namespace adjblas {

/// Relative pivot threshold: a pivot is rejected when |u_kk| <= kPivotFloor * max|a_ij|.
inline constexpr double kPivotFloor = 1e-12;

/// Partial-pivoting factorization P A = L U of a square matrix.
///
/// `lu` packs the strictly lower part of the unit-lower L and the upper U.
/// `perm[i]` is the row of A that ended up in row i, i.e. (P A)(i, :) = A(perm[i], :).
/// A factorization is immutable once built and serves any number of plain and
/// transposed solves without refactoring.
template <typename Scalar>
class LUFactorization {
 public:
  LUFactorization(Matrix<Scalar> lu, std::vector<Index> perm, std::size_t num_swaps)
      : lu_(std::move(lu)), perm_(std::move(perm)), num_swaps_(num_swaps) {}

  Index n() const { return lu_.rows(); }
  const Matrix<Scalar>& lu() const { return lu_; }
  const std::vector<Index>& perm() const { return perm_; }
  std::size_t num_swaps() const { return num_swaps_; }

  Matrix<Scalar> lower() const {
    Matrix<Scalar> L = lu_.template triangularView<Eigen::StrictlyLower>();
    L.diagonal().setOnes();
    return L;
  }

  Matrix<Scalar> upper() const { return lu_.template triangularView<Eigen::Upper>(); }

  Matrix<Scalar> permutation_matrix() const {
    Matrix<Scalar> P = Matrix<Scalar>::Zero(n(), n());
    for (Index i = 0; i < n(); ++i) P(i, perm_[static_cast<std::size_t>(i)]) = Scalar(1);
    return P;
  }

  /// Returns A = P^T L U.
  Matrix<Scalar> reconstruct() const {
    const Matrix<Scalar> LU = lower() * upper();
    Matrix<Scalar> A(n(), n());
    for (Index i = 0; i < n(); ++i) A.row(perm_[static_cast<std::size_t>(i)]) = LU.row(i);
    return A;
  }

 private:
  Matrix<Scalar> lu_;
  std::vector<Index> perm_;
  std::size_t num_swaps_ = 0;
};

template <typename Derived>
LUFactorization<typename Derived::Scalar> lu_factor(const Eigen::MatrixBase<Derived>& A) {
  using Scalar = typename Derived::Scalar;
  using std::abs;
  if (A.rows() != A.cols()) {
    throw DimensionError("lu_factor: matrix must be square, got " + shape_string(A));
  }
  const Index n = A.rows();
  Matrix<Scalar> lu = A;
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::size_t swaps = 0;

  const Scalar floor = Scalar(kPivotFloor) * (n > 0 ? lu.cwiseAbs().maxCoeff() : Scalar(0));

  for (Index k = 0; k < n; ++k) {
    Index p = k;
    Scalar best = abs(lu(k, k));
    for (Index i = k + 1; i < n; ++i) {
      if (abs(lu(i, k)) > best) {
        best = abs(lu(i, k));
        p = i;
      }
    }
    if (!(best > floor)) throw SingularMatrixError(static_cast<std::size_t>(k));
    if (p != k) {
      lu.row(k).swap(lu.row(p));
      std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(p)]);
      ++swaps;
    }
    const Scalar pivot = lu(k, k);
    for (Index i = k + 1; i < n; ++i) lu(i, k) /= pivot;
    for (Index j = k + 1; j < n; ++j) {
      const Scalar ukj = lu(k, j);
      for (Index i = k + 1; i < n; ++i) lu(i, j) -= lu(i, k) * ukj;
    }
  }
  flop_counter().add_factor(flops::lu_factor(static_cast<std::uint64_t>(n)));
  return {std::move(lu), std::move(perm), swaps};
}

/// Solves A x = b with the stored factors.
template <typename Scalar, typename Derived>
Vector<Scalar> lu_solve(const LUFactorization<Scalar>& F, const Eigen::MatrixBase<Derived>& b) {
  const Index n = F.n();
  if (b.cols() != 1 || b.rows() != n) {
    throw DimensionError("lu_solve: factorization of order " + std::to_string(n) +
                         ", right-hand side " + shape_string(b));
  }
  const Matrix<Scalar>& lu = F.lu();
  Vector<Scalar> x(n);
  for (Index i = 0; i < n; ++i) x(i) = b(F.perm()[static_cast<std::size_t>(i)]);
  // L y = P b, column-oriented.
  for (Index j = 0; j < n; ++j) {
    const Scalar xj = x(j);
    for (Index i = j + 1; i < n; ++i) x(i) -= lu(i, j) * xj;
  }
  // U x = y
  for (Index j = n - 1; j >= 0; --j) {
    x(j) /= lu(j, j);
    const Scalar xj = x(j);
    for (Index i = 0; i < j; ++i) x(i) -= lu(i, j) * xj;
  }
  flop_counter().add_solve(flops::lu_solve(static_cast<std::uint64_t>(n)));
  return x;
}

/// Solves A^T y = c with the same factors, via A^T = U^T L^T P:
/// U^T z = c, then L^T w = z, then y = P^T w.
template <typename Scalar, typename Derived>
Vector<Scalar> lu_solve_transposed(const LUFactorization<Scalar>& F,
                                   const Eigen::MatrixBase<Derived>& c) {
  const Index n = F.n();
  if (c.cols() != 1 || c.rows() != n) {
    throw DimensionError("lu_solve_transposed: factorization of order " + std::to_string(n) +
                         ", right-hand side " + shape_string(c));
  }
  const Matrix<Scalar>& lu = F.lu();
  Vector<Scalar> w = c;
  // U^T z = c: row j of U^T is column j of U, so this is a dot per step.
  for (Index j = 0; j < n; ++j) {
    Scalar s = w(j);
    for (Index i = 0; i < j; ++i) s -= lu(i, j) * w(i);
    w(j) = s / lu(j, j);
  }
  // L^T w = z, unit diagonal.
  for (Index j = n - 1; j >= 0; --j) {
    Scalar s = w(j);
    for (Index i = j + 1; i < n; ++i) s -= lu(i, j) * w(i);
    w(j) = s;
  }
  Vector<Scalar> y(n);
  for (Index i = 0; i < n; ++i) y(F.perm()[static_cast<std::size_t>(i)]) = w(i);
  flop_counter().add_solve(flops::lu_solve(static_cast<std::uint64_t>(n)));
  return y;
}

/// Crude bound ||A||_1 ||A^-1||_1 with A^-1 formed column by column. Used to
/// gate random test draws, not as a numerical estimator.
template <typename Derived>
double condition_estimate(const Eigen::MatrixBase<Derived>& A) {
  const auto F = lu_factor(A);
  const Index n = F.n();
  double inv_norm = 0.0;
  for (Index j = 0; j < n; ++j) {
    const auto col = lu_solve(F, Vector<typename Derived::Scalar>::Unit(n, j));
    inv_norm = std::max(inv_norm, static_cast<double>(col.cwiseAbs().sum()));
  }
  const double a_norm = A.cwiseAbs().colwise().sum().maxCoeff();
  return a_norm * inv_norm;
}

}  // namespace adjblas

#endif  // ADJBLAS_LU_HPP
