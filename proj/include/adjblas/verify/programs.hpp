#ifndef ADJBLAS_VERIFY_PROGRAMS_HPP
#define ADJBLAS_VERIFY_PROGRAMS_HPP

#include "adjblas/tape.hpp"
#include "adjblas/verify/random.hpp"

namespace adjblas::verify {

struct ProgramOptions {
  Index max_dim = 8;
  int max_depth = 6;
};

/// A recorded straight-line program with a scalar output and a seed for it.
struct RandomProgram {
  Tape tape;
  NodeHandle output;
  Value seed;
  int depth = 0;
  bool has_fan_out = false;
  bool has_solve = false;
};

/// Draws a random program over {add, scale, mul, dot, gemv, gemm, sandwich,
/// solve}. Every program starts from a solve x = A^-1 b with a
/// well-conditioned active A, extends it with a random chain of operations
/// that mixes in fresh and previously recorded operands, and reduces to a
/// scalar. At least one node is consumed twice (fan-out) and the longest
/// chain of operations never exceeds `max_depth`.
RandomProgram random_program(Rng& rng, const ProgramOptions& options = {});

/// Longest chain of operation nodes ending at `h`.
int program_depth(const Tape& tape, const NodeHandle& h);

/// True if some node is consumed by more than one input slot.
bool has_fan_out(const Tape& tape);

}  // namespace adjblas::verify

#endif  // ADJBLAS_VERIFY_PROGRAMS_HPP
