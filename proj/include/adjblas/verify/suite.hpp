#ifndef ADJBLAS_VERIFY_SUITE_HPP
#define ADJBLAS_VERIFY_SUITE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adjblas/types.hpp"
#include "adjblas/verify/report.hpp"

namespace adjblas::verify {

/// Default tolerances.
namespace tol {
inline constexpr double kIdentityMultiply = 1e-12;
inline constexpr double kIdentitySolve = 1e-10;
inline constexpr double kFdTangent = 1e-6;
inline constexpr double kFdSumSandwich = 1e-6;
inline constexpr double kFdSolveAdjoint = 1e-5;
inline constexpr double kFdSecondOrder = 1e-5;
inline constexpr double kOracle = 1e-9;
inline constexpr double kLevelCollapse = 1e-15;
inline constexpr double kFactorExponent = 0.2;   // |slope - 3|
inline constexpr double kSolveExponent = 0.1;    // |slope - 2|
}  // namespace tol

/// Check groups, each producing one or more reports:
///   mul dot gemv gemm sandwich sum_sandwich  identity + finite-difference checks
///   solve          identity, tangent/adjoint FD, scalar-oracle comparison
///   second_order   FD of the solve adjoint, zero-factorization count
///   tape           tape reverse vs scalar oracle on random programs
///   reuse          flop-growth exponents and single-factorization reuse
///   collapse       1x1 dot/gemv/gemm adjoints vs scalar multiplication
const std::vector<std::string>& check_groups();

struct SuiteConfig {
  std::vector<std::string> checks = check_groups();
  std::uint64_t seed = 42;
  /// Overrides every check's default trial count.
  std::optional<std::uint64_t> trials;
  /// Upper bound on all randomly drawn rule dimensions. 1 collapses every rule
  /// to its scalar case. Bench sizes of the reuse group are not affected.
  Index max_dim = 16;
  /// Tolerance overrides keyed by report name, e.g. "identity/solve".
  std::map<std::string, double> tolerances;
};

/// Runs the configured groups in a fixed order. Throws adjblas::Error for an
/// empty or unknown check set ("unknown check: <name>").
std::vector<VerificationReport> run_suite(const SuiteConfig& config);

bool all_passed(const std::vector<VerificationReport>& reports);

}  // namespace adjblas::verify

#endif  // ADJBLAS_VERIFY_SUITE_HPP
