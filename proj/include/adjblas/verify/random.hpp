#ifndef ADJBLAS_VERIFY_RANDOM_HPP
#define ADJBLAS_VERIFY_RANDOM_HPP

#include <cstdint>
#include <random>
#include <string_view>

#include "adjblas/types.hpp"

namespace adjblas::verify {

/// Seeded generator for test draws. All entries are uniform in [-1, 1].
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return dist_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(engine_); }
  Index integer(Index lo, Index hi);  // inclusive range
  bool coin(double p_true = 0.5) { return unit_(engine_) < p_true; }

  DenseVector vector(Index n);
  DenseMatrix matrix(Index rows, Index cols);

  /// Strictly diagonally dominant by rows and columns: R + (n + 1) I with R
  /// uniform in [-1, 1]. Partial pivoting performs no swaps on these and the
  /// condition number stays small for every n.
  DenseMatrix well_conditioned(Index n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> dist_{-1.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

/// Stable per-check seed derived from the suite seed and the check name, so a
/// report depends only on (check_name, seed, trials).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view name);

}  // namespace adjblas::verify

#endif  // ADJBLAS_VERIFY_RANDOM_HPP
