#ifndef ADJBLAS_VERIFY_SCALAR_ORACLE_HPP
#define ADJBLAS_VERIFY_SCALAR_ORACLE_HPP

// Reference reverse mode at the level of scalar arithmetic.
//
// scalar_oracle_adjoint() replays a recorded Tape entry by entry: every matrix
// node is expanded into its defining loops over +, -, *, / and differentiated
// with the scalar rules only. None of the BLAS-level adjoint rules are used.
// Solve nodes are expanded into Doolittle elimination plus forward/backward
// substitution with the row order frozen to the permutation the tape chose, so
// the oracle differentiates the implicit function A x = b without
// differentiating pivot selection.

#include <cstddef>
#include <optional>
#include <vector>

#include "adjblas/tape.hpp"
#include "adjblas/types.hpp"

namespace adjblas::verify {

/// Minimal Wengert list over doubles. Constants (id < 0) carry no derivative.
class ScalarTape {
 public:
  struct Var {
    double value = 0.0;
    std::ptrdiff_t id = -1;
  };

  Var constant(double v) const { return {v, -1}; }
  Var variable(double v);

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var div(Var a, Var b);

  std::size_t size() const { return entries_.size(); }

  /// Reverse sweep. `seeds` pairs variables with their adjoint seeds; returns
  /// the adjoint of every variable, indexed by id.
  std::vector<double> adjoints(const std::vector<std::pair<Var, double>>& seeds) const;

 private:
  struct Entry {
    std::ptrdiff_t lhs = -1;
    std::ptrdiff_t rhs = -1;
    double d_lhs = 0.0;
    double d_rhs = 0.0;
  };
  Var push(double value, Var a, double da, Var b, double db);

  std::vector<Entry> entries_;
};

/// Oracle result, shaped like an AdjointStore.
class OracleAdjoints {
 public:
  const DenseMatrix& adjoint(const NodeHandle& h) const;
  bool has(std::size_t id) const { return id < adjoints_.size() && adjoints_[id].has_value(); }
  std::size_t size() const { return adjoints_.size(); }

 private:
  friend OracleAdjoints scalar_oracle_adjoint(const Tape&, const NodeHandle&, const Value&);
  std::uint64_t tape_id_ = 0;
  std::vector<std::optional<DenseMatrix>> adjoints_;
};

/// Adjoints of every active node of `tape` for the given seed.
OracleAdjoints scalar_oracle_adjoint(const Tape& tape, const NodeHandle& seed,
                                     const Value& seed_value);

}  // namespace adjblas::verify

#endif  // ADJBLAS_VERIFY_SCALAR_ORACLE_HPP
