#ifndef ADJBLAS_VERIFY_FD_HPP
#define ADJBLAS_VERIFY_FD_HPP

#include <Eigen/Core>

#include <cmath>
#include <string>
#include <type_traits>

#include "adjblas/errors.hpp"

namespace adjblas::verify {

/// Default central-difference step for unit-scaled inputs.
inline constexpr double kFdStep = 1e-5;

class FdError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline bool finite(double v) { return std::isfinite(v); }

template <typename Derived>
bool finite(const Eigen::DenseBase<Derived>& v) {
  return v.allFinite();
}

}  // namespace detail

/// Central difference (f(p + h d) - f(p - h d)) / (2h).
///
/// `Point` is anything with `p + h * d` (double, Eigen types). `f` may return a
/// double or an Eigen object; the result has the same type, evaluated.
template <typename F, typename Point>
auto fd_directional(F&& f, const Point& point, const Point& direction, double h = kFdStep) {
  if (!(h > 0.0) || !std::isfinite(h)) throw FdError("fd_directional: step must be positive");
  const Point plus = point + h * direction;
  const Point minus = point - h * direction;
  const auto f_plus = f(plus);
  if (!detail::finite(f_plus)) throw FdError("fd_directional: non-finite f(point + h*d)");
  const auto f_minus = f(minus);
  if (!detail::finite(f_minus)) throw FdError("fd_directional: non-finite f(point - h*d)");
  if constexpr (std::is_arithmetic_v<std::decay_t<decltype(f_plus)>>) {
    return (f_plus - f_minus) / (2.0 * h);
  } else {
    using Result = typename std::decay_t<decltype(f_plus)>::PlainObject;
    Result d = (f_plus - f_minus) / (2.0 * h);
    return d;
  }
}

/// Scale-aware error used by every derivative comparison:
/// max|computed - reference| / max(max|reference|, floor).
template <typename DA, typename DB>
double scaled_error(const Eigen::DenseBase<DA>& computed, const Eigen::DenseBase<DB>& reference,
                    double floor = 1.0) {
  if (computed.size() == 0) return 0.0;
  const double diff = (computed.derived() - reference.derived()).cwiseAbs().maxCoeff();
  const double scale = std::max(reference.derived().cwiseAbs().maxCoeff(), floor);
  return diff / scale;
}

inline double scaled_error(double computed, double reference, double floor = 1.0) {
  return std::abs(computed - reference) / std::max(std::abs(reference), floor);
}

/// Normwise relative error; 0 when both sides vanish.
template <typename DA, typename DB>
double relative_error(const Eigen::DenseBase<DA>& computed, const Eigen::DenseBase<DB>& reference) {
  if (computed.size() == 0) return 0.0;
  const double diff = (computed.derived() - reference.derived()).cwiseAbs().maxCoeff();
  const double scale = std::max(reference.derived().cwiseAbs().maxCoeff(),
                                computed.derived().cwiseAbs().maxCoeff());
  return scale == 0.0 ? diff : diff / scale;
}

}  // namespace adjblas::verify

#endif  // ADJBLAS_VERIFY_FD_HPP
