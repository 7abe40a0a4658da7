#ifndef ADJBLAS_VERIFY_IDENTITY_HPP
#define ADJBLAS_VERIFY_IDENTITY_HPP

// Adjoint identity checks: for a tangent rule T and its adjoint rule A,
//   <T(in_tangents), out_seed> == sum_i <in_tangent_i, A(out_seed)_i>
// at random points. Each rule pair supplies one trial that returns both sides.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "adjblas/types.hpp"
#include "adjblas/verify/random.hpp"
#include "adjblas/verify/report.hpp"

namespace adjblas::verify {

/// Problem dimensions for a rule pair. A gemm is (m x n) * (n x p); a sandwich
/// is (m x n) * (n x q) * (q x p); `terms` is the number of sandwich terms.
/// With `vary` set, each trial draws every dimension uniformly from [1, value].
struct Dims {
  Index m = 4;
  Index n = 4;
  Index p = 4;
  Index q = 4;
  Index terms = 3;
  bool vary = false;

  static Dims uniform(Index d, bool vary = false) { return {d, d, d, d, 3, vary}; }
};

struct IdentitySides {
  double lhs = 0.0;  // <tangent_out, out_seed>
  double rhs = 0.0;  // sum <in_tangent, in_adjoint>
};

struct RulePair {
  std::string name;
  bool solve_type = false;
  std::function<IdentitySides(Rng&, const Dims&)> trial;
};

/// Built-in pairs: mul, dot, gemv, gemm, sandwich, sum_sandwich, solve.
const std::vector<RulePair>& builtin_rule_pairs();

/// Looks up a built-in pair; accepts "sum-sandwich" as an alias. Throws
/// adjblas::Error("unknown rule pair: <name>") otherwise.
const RulePair& find_rule_pair(const std::string& name);

/// |lhs - rhs| / max(|lhs|, |rhs|, 1).
double identity_residual(const IdentitySides& s);

VerificationReport check_identity(const RulePair& pair, const Dims& dims, std::uint64_t trials,
                                  std::uint64_t seed, double tol);

VerificationReport check_identity(const std::string& pair_name, const Dims& dims,
                                  std::uint64_t trials, std::uint64_t seed, double tol);

}  // namespace adjblas::verify

#endif  // ADJBLAS_VERIFY_IDENTITY_HPP
