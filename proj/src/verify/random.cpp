#include "adjblas/verify/random.hpp"

namespace adjblas::verify {

Index Rng::integer(Index lo, Index hi) {
  std::uniform_int_distribution<Index> d(lo, hi);
  return d(engine_);
}

DenseVector Rng::vector(Index n) {
  DenseVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = uniform();
  return v;
}

DenseMatrix Rng::matrix(Index rows, Index cols) {
  DenseMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = uniform();
  }
  return m;
}

DenseMatrix Rng::well_conditioned(Index n) {
  DenseMatrix A = matrix(n, n);
  A.diagonal().array() += static_cast<double>(n + 1);
  return A;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view name) {
  // FNV-1a over the name, then a splitmix64 finalizer mixed with the seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = h ^ (seed + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace adjblas::verify
