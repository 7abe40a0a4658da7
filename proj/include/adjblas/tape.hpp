#ifndef ADJBLAS_TAPE_HPP
#define ADJBLAS_TAPE_HPP

// Matrix-granularity reverse mode.
//
// A Tape records a straight-line program whose elementals are BLAS-level
// operations and linear solves. Primal values are computed and stored at
// record time (solve nodes also keep their LU factorization). reverse()
// walks the record backwards, calls the rules from adjoint.hpp and
// accumulates (+=) their results, so shared subexpressions (fan-out) are
// handled here rather than in the rules.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adjblas/lu.hpp"
#include "adjblas/types.hpp"

namespace adjblas {

enum class NodeKind { input, add, scale, mul, dot, gemv, gemm, sandwich, solve };
enum class Activity { active, passive };
enum class ValueKind { scalar, vector, matrix };

std::string_view to_string(NodeKind kind);
std::string_view to_string(ValueKind kind);

struct Shape {
  ValueKind kind = ValueKind::scalar;
  Index rows = 1;
  Index cols = 1;

  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

/// A scalar, column vector or matrix. Storage is always a DenseMatrix
/// (1x1 for scalars, n x 1 for vectors); the kind keeps them apart.
class Value {
 public:
  Value() : Value(0.0) {}
  Value(double s);               // NOLINT(google-explicit-constructor)
  Value(DenseVector v);          // NOLINT(google-explicit-constructor)
  Value(DenseMatrix m);          // NOLINT(google-explicit-constructor)

  static Value zeros(const Shape& shape);

  ValueKind kind() const { return shape_.kind; }
  const Shape& shape() const { return shape_; }
  const DenseMatrix& data() const { return data_; }
  DenseMatrix& data() { return data_; }

  double scalar() const;
  DenseVector vector() const;
  const DenseMatrix& matrix() const;

 private:
  Value(ValueKind kind, DenseMatrix data);

  Shape shape_;
  DenseMatrix data_;
};

struct NodeHandle {
  std::uint64_t tape_id = 0;
  std::size_t id = 0;
  Shape shape;
  Activity activity = Activity::passive;

  bool active() const { return activity == Activity::active; }
};

/// Extra operands that are not tape variables.
struct OpParams {
  double factor = 1.0;  // scale: y = factor * x
};

struct TapeNode {
  NodeKind kind = NodeKind::input;
  std::vector<std::size_t> inputs;
  Value primal;
  Activity activity = Activity::passive;
  double factor = 1.0;
  std::optional<LUFactorization<double>> factorization;
};

class Tape;

/// Adjoint buffers of one reverse sweep, one per active node.
class AdjointStore {
 public:
  std::uint64_t tape_id() const { return tape_id_; }
  std::size_t size() const { return buffers_.size(); }

  /// Accumulated adjoint of `h`. Throws TapeError for passive, foreign or
  /// unknown handles.
  const Value& adjoint(const NodeHandle& h) const;

  bool has_buffer(std::size_t id) const;

 private:
  friend class Tape;
  std::uint64_t tape_id_ = 0;
  std::vector<std::optional<Value>> buffers_;
};

class Tape {
 public:
  Tape();
  Tape(Tape&&) noexcept = default;
  Tape& operator=(Tape&&) noexcept = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  std::uint64_t id() const { return id_; }
  std::size_t size() const { return nodes_.size(); }
  std::span<const TapeNode> nodes() const { return nodes_; }
  const TapeNode& node(const NodeHandle& h) const;
  const Value& primal(const NodeHandle& h) const;
  NodeHandle handle(std::size_t id) const;

  NodeHandle record_input(Value value, Activity activity);
  NodeHandle record_op(NodeKind kind, std::span<const NodeHandle> inputs, OpParams params = {});

  NodeHandle add(const NodeHandle& a, const NodeHandle& b);
  NodeHandle scale(double factor, const NodeHandle& x);
  NodeHandle mul(const NodeHandle& a, const NodeHandle& x);
  NodeHandle dot(const NodeHandle& a, const NodeHandle& x);
  NodeHandle gemv(const NodeHandle& A, const NodeHandle& x);
  NodeHandle gemm(const NodeHandle& A, const NodeHandle& X);
  NodeHandle sandwich(const NodeHandle& A, const NodeHandle& X, const NodeHandle& B);
  NodeHandle solve(const NodeHandle& A, const NodeHandle& b);

  /// Single-seed reverse sweep. Buffers start at zero, the seed node's buffer
  /// is set to `seed_value`, and nodes are visited in reverse record order.
  AdjointStore reverse(const NodeHandle& seed, const Value& seed_value) const;

  /// One line per node: "id kind shape inputs".
  std::string dump() const;

 private:
  void check_handle(const NodeHandle& h) const;

  std::uint64_t id_;
  std::vector<TapeNode> nodes_;
};

// Free-function spellings of the tape API.
inline Tape tape_new() { return Tape{}; }

inline NodeHandle record_input(Tape& t, Value value, Activity activity) {
  return t.record_input(std::move(value), activity);
}

inline NodeHandle record_op(Tape& t, NodeKind kind, std::span<const NodeHandle> inputs,
                            OpParams params = {}) {
  return t.record_op(kind, inputs, params);
}

inline NodeHandle record_op(Tape& t, NodeKind kind, std::initializer_list<NodeHandle> inputs,
                            OpParams params = {}) {
  return t.record_op(kind, std::span<const NodeHandle>(inputs.begin(), inputs.size()), params);
}

inline AdjointStore reverse(const Tape& t, const NodeHandle& seed, const Value& seed_value) {
  return t.reverse(seed, seed_value);
}

inline const Value& adjoint_of(const AdjointStore& store, const NodeHandle& h) {
  return store.adjoint(h);
}

}  // namespace adjblas

#endif  // ADJBLAS_TAPE_HPP
