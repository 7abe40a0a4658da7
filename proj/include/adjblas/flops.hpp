#ifndef ADJBLAS_FLOPS_HPP
#define ADJBLAS_FLOPS_HPP

#include <atomic>
#include <cstdint>

namespace adjblas {

/// Plain snapshot of the three operation classes. Differences of two
/// snapshots give the cost of the code run in between.
struct FlopCounts {
  std::uint64_t factor = 0;
  std::uint64_t solve = 0;
  std::uint64_t multiply = 0;

  std::uint64_t total() const { return factor + solve + multiply; }

  friend FlopCounts operator-(const FlopCounts& a, const FlopCounts& b) {
    return {a.factor - b.factor, a.solve - b.solve, a.multiply - b.multiply};
  }
  friend FlopCounts operator+(const FlopCounts& a, const FlopCounts& b) {
    return {a.factor + b.factor, a.solve + b.solve, a.multiply + b.multiply};
  }
  friend bool operator==(const FlopCounts&, const FlopCounts&) = default;
};

/// Monotone tallies of floating-point work. Counts are closed-form per call,
/// not per instruction. Increments are atomic, so one counter may be shared
/// between threads.
class FlopCounter {
 public:
  FlopCounter() = default;
  FlopCounter(const FlopCounter&) = delete;
  FlopCounter& operator=(const FlopCounter&) = delete;

  void add_factor(std::uint64_t n) { factor_.fetch_add(n, std::memory_order_relaxed); }
  void add_solve(std::uint64_t n) { solve_.fetch_add(n, std::memory_order_relaxed); }
  void add_multiply(std::uint64_t n) { multiply_.fetch_add(n, std::memory_order_relaxed); }

  std::uint64_t factor_flops() const { return factor_.load(std::memory_order_relaxed); }
  std::uint64_t solve_flops() const { return solve_.load(std::memory_order_relaxed); }
  std::uint64_t multiply_flops() const { return multiply_.load(std::memory_order_relaxed); }

  FlopCounts snapshot() const { return {factor_flops(), solve_flops(), multiply_flops()}; }

  /// Adds another session's counts into this one.
  void merge(const FlopCounts& c) {
    add_factor(c.factor);
    add_solve(c.solve);
    add_multiply(c.multiply);
  }

  void reset() {
    factor_.store(0);
    solve_.store(0);
    multiply_.store(0);
  }

 private:
  std::atomic<std::uint64_t> factor_{0};
  std::atomic<std::uint64_t> solve_{0};
  std::atomic<std::uint64_t> multiply_{0};
};

/// The counter core operations charge on the calling thread. This is the
/// process-wide counter unless a ScopedFlopCounter is active.
FlopCounter& flop_counter();

/// The process-wide counter, regardless of any scoped redirection.
FlopCounter& global_flop_counter();

/// Redirects the calling thread's flop accounting to `counter` for the
/// lifetime of this object.
class ScopedFlopCounter {
 public:
  explicit ScopedFlopCounter(FlopCounter& counter);
  ~ScopedFlopCounter();
  ScopedFlopCounter(const ScopedFlopCounter&) = delete;
  ScopedFlopCounter& operator=(const ScopedFlopCounter&) = delete;

 private:
  FlopCounter* previous_;
};

namespace flops {

inline std::uint64_t dot(std::uint64_t n) { return n == 0 ? 0 : 2 * n - 1; }

inline std::uint64_t gemv(std::uint64_t m, std::uint64_t n) { return m * dot(n); }

inline std::uint64_t gemm(std::uint64_t m, std::uint64_t n, std::uint64_t p) {
  return m * p * dot(n);
}

/// Doolittle elimination: for pivot column k, (n-k-1) divisions plus a rank-1
/// update of the trailing (n-k-1)^2 block. Sums to ~(2/3) n^3.
inline std::uint64_t lu_factor(std::uint64_t n) {
  std::uint64_t total = 0;
  for (std::uint64_t k = 0; k < n; ++k) {
    const std::uint64_t r = n - k - 1;
    total += r + 2 * r * r;
  }
  return total;
}

/// One unit-lower and one upper triangular substitution: 2n^2 - n.
inline std::uint64_t lu_solve(std::uint64_t n) { return 2 * n * n - n; }

inline std::uint64_t outer(std::uint64_t m, std::uint64_t n) { return m * n; }

inline std::uint64_t axpy(std::uint64_t n) { return n; }

}  // namespace flops

}  // namespace adjblas

#endif  // ADJBLAS_FLOPS_HPP
