#ifndef ADJBLAS_BENCH_HPP
#define ADJBLAS_BENCH_HPP

// Flop-counted comparison of adjoint solves with and without factorization
// reuse.
//
// For each n, one system A x = b is factored and solved, then k adjoint
// solves follow. With reuse every adjoint solve goes through the primal LU;
// without reuse each adjoint solve refactors A first.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "adjblas/types.hpp"

namespace adjblas {

struct BenchRecord {
  Index n = 0;
  std::uint64_t factor_flops = 0;
  std::uint64_t solve_flops_per_adjoint = 0;
  double wall_time_factor = 0.0;         // seconds per factorization
  double wall_time_adjoint_solve = 0.0;  // seconds per adjoint solve
  bool reuse = false;

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

struct BenchConfig {
  std::vector<Index> sizes{64, 128, 256};
  std::uint64_t adjoint_count = 16;
  std::uint64_t repetitions = 1;
  std::uint64_t seed = 42;
};

/// Two records per size, reuse first. Throws adjblas::Error on sizes < 2,
/// an empty size list or adjoint_count < 1.
std::vector<BenchRecord> run_bench(const BenchConfig& config);

/// Least-squares slope of log(value) against log(n).
double fit_exponent(const std::vector<Index>& n, const std::vector<double>& value);

struct BenchExponents {
  double factor = 0.0;
  double reused_adjoint_solve = 0.0;
};

/// Exponents over the reuse records. Needs at least two distinct sizes.
BenchExponents fit_bench_exponents(const std::vector<BenchRecord>& records);

inline constexpr const char* kBenchCsvHeader =
    "n,factor_flops,solve_flops_per_adjoint,wall_time_factor,wall_time_adjoint_solve,reuse";

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records);
std::vector<BenchRecord> read_bench_csv(std::istream& in);

std::string to_json_line(const BenchRecord& r);
BenchRecord parse_bench_json_line(const std::string& line);
void write_bench_json_lines(std::ostream& out, const std::vector<BenchRecord>& records);
std::vector<BenchRecord> read_bench_json_lines(std::istream& in);

}  // namespace adjblas

#endif  // ADJBLAS_BENCH_HPP
