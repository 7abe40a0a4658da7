#ifndef ADJBLAS_TYPES_HPP
#define ADJBLAS_TYPES_HPP

#include <Eigen/Core>

#include <string>

#include "adjblas/errors.hpp"

namespace adjblas {

using Index = Eigen::Index;

// Column-major throughout (Eigen's default). Transposition is always explicit.
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using DenseMatrix = Matrix<double>;
using DenseVector = Vector<double>;

inline std::string shape_string(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

template <typename Derived>
std::string shape_string(const Eigen::EigenBase<Derived>& m) {
  return shape_string(m.rows(), m.cols());
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

/// Throws DimensionError unless `a` and `b` have identical shape.
template <typename DA, typename DB>
void require_same_shape(const Eigen::EigenBase<DA>& a, const Eigen::EigenBase<DB>& b,
                        const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape mismatch " + shape_string(a) +
                         " vs " + shape_string(b));
  }
}

/// Value together with its directional derivative (forward mode).
template <typename T>
struct TangentPair {
  T value;
  T tangent;
};

/// Value together with its adjoint (reverse mode).
template <typename T>
struct AdjointPair {
  T value;
  T adjoint;
};

template <typename T>
TangentPair<T> make_tangent_pair(T value, T tangent) {
  require_same_shape(value, tangent, "make_tangent_pair");
  return {std::move(value), std::move(tangent)};
}

template <typename T>
AdjointPair<T> make_adjoint_pair(T value, T adjoint) {
  require_same_shape(value, adjoint, "make_adjoint_pair");
  return {std::move(value), std::move(adjoint)};
}

inline TangentPair<double> make_tangent_pair(double value, double tangent) {
  return {value, tangent};
}

inline AdjointPair<double> make_adjoint_pair(double value, double adjoint) {
  return {value, adjoint};
}

}  // namespace adjblas

#endif  // ADJBLAS_TYPES_HPP
