#include "adjblas/tape.hpp"

#include <atomic>
#include <sstream>

#include "adjblas/adjoint.hpp"
#include "adjblas/blas.hpp"

namespace adjblas {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::input: return "input";
    case NodeKind::add: return "add";
    case NodeKind::scale: return "scale";
    case NodeKind::mul: return "mul";
    case NodeKind::dot: return "dot";
    case NodeKind::gemv: return "gemv";
    case NodeKind::gemm: return "gemm";
    case NodeKind::sandwich: return "sandwich";
    case NodeKind::solve: return "solve";
  }
  return "?";
}

std::string_view to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::scalar: return "scalar";
    case ValueKind::vector: return "vector";
    case ValueKind::matrix: return "matrix";
  }
  return "?";
}

std::string to_string(const Shape& s) {
  switch (s.kind) {
    case ValueKind::scalar: return "scalar";
    case ValueKind::vector: return "vector[" + std::to_string(s.rows) + "]";
    case ValueKind::matrix: return "matrix[" + shape_string(s.rows, s.cols) + "]";
  }
  return "?";
}

// ---- Value ----

Value::Value(ValueKind kind, DenseMatrix data)
    : shape_{kind, data.rows(), data.cols()}, data_(std::move(data)) {}

Value::Value(double s) : Value(ValueKind::scalar, DenseMatrix::Constant(1, 1, s)) {}

Value::Value(DenseVector v) : Value(ValueKind::vector, DenseMatrix(std::move(v))) {}

Value::Value(DenseMatrix m) : Value(ValueKind::matrix, std::move(m)) {}

Value Value::zeros(const Shape& shape) {
  return Value(shape.kind, DenseMatrix::Zero(shape.rows, shape.cols));
}

double Value::scalar() const {
  if (kind() != ValueKind::scalar) throw TapeError("value is a " + to_string(shape_) + ", not a scalar");
  return data_(0, 0);
}

DenseVector Value::vector() const {
  if (kind() != ValueKind::vector) throw TapeError("value is a " + to_string(shape_) + ", not a vector");
  return data_.col(0);
}

const DenseMatrix& Value::matrix() const {
  if (kind() != ValueKind::matrix) throw TapeError("value is a " + to_string(shape_) + ", not a matrix");
  return data_;
}

// ---- AdjointStore ----

bool AdjointStore::has_buffer(std::size_t id) const {
  return id < buffers_.size() && buffers_[id].has_value();
}

const Value& AdjointStore::adjoint(const NodeHandle& h) const {
  if (h.tape_id != tape_id_) throw TapeError("foreign handle: recorded on another tape");
  if (h.id >= buffers_.size()) throw TapeError("unknown handle " + std::to_string(h.id));
  if (!buffers_[h.id]) throw TapeError("passive variable has no adjoint");
  return *buffers_[h.id];
}

// ---- Tape ----

namespace {

std::uint64_t next_tape_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

std::string describe(const NodeHandle& h) { return to_string(h.shape); }

void require_kind(NodeKind op, const NodeHandle& h, ValueKind kind) {
  if (h.shape.kind != kind) {
    throw DimensionError(std::string(to_string(op)) + ": expected " +
                         std::string(to_string(kind)) + " operand, got " + describe(h));
  }
}

}  // namespace

Tape::Tape() : id_(next_tape_id()) {}

void Tape::check_handle(const NodeHandle& h) const {
  if (h.tape_id != id_) throw TapeError("foreign handle: recorded on another tape");
  if (h.id >= nodes_.size()) throw TapeError("unknown handle " + std::to_string(h.id));
}

const TapeNode& Tape::node(const NodeHandle& h) const {
  check_handle(h);
  return nodes_[h.id];
}

const Value& Tape::primal(const NodeHandle& h) const { return node(h).primal; }

NodeHandle Tape::handle(std::size_t id) const {
  if (id >= nodes_.size()) throw TapeError("unknown handle " + std::to_string(id));
  const TapeNode& n = nodes_[id];
  return {id_, id, n.primal.shape(), n.activity};
}

NodeHandle Tape::record_input(Value value, Activity activity) {
  if (value.data().size() == 0) throw TapeError("empty value");
  if (!value.data().allFinite()) throw TapeError("non-finite value");
  TapeNode& node = nodes_.emplace_back();
  node.kind = NodeKind::input;
  node.primal = std::move(value);
  node.activity = activity;
  return handle(nodes_.size() - 1);
}

NodeHandle Tape::record_op(NodeKind kind, std::span<const NodeHandle> inputs, OpParams params) {
  auto arity = [&](std::size_t n) {
    if (inputs.size() != n) {
      throw TapeError(std::string(to_string(kind)) + ": expected " + std::to_string(n) +
                      " inputs, got " + std::to_string(inputs.size()));
    }
  };
  for (const auto& h : inputs) check_handle(h);

  TapeNode node;
  node.kind = kind;
  auto in = [&](std::size_t i) -> const Value& { return nodes_[inputs[i].id].primal; };

  switch (kind) {
    case NodeKind::input:
      throw TapeError("record_op: use record_input for input nodes");
    case NodeKind::add:
      arity(2);
      if (inputs[0].shape != inputs[1].shape) {
        throw DimensionError("add: shape mismatch " + describe(inputs[0]) + " vs " +
                             describe(inputs[1]));
      }
      {
        DenseMatrix sum = in(0).data() + in(1).data();
        flop_counter().add_multiply(flops::axpy(static_cast<std::uint64_t>(sum.size())));
        node.primal = in(0).kind() == ValueKind::scalar   ? Value(sum(0, 0))
                      : in(0).kind() == ValueKind::vector ? Value(DenseVector(sum.col(0)))
                                                          : Value(std::move(sum));
      }
      break;
    case NodeKind::scale:
      arity(1);
      if (!std::isfinite(params.factor)) throw TapeError("scale: non-finite factor");
      node.factor = params.factor;
      {
        Value v = in(0);
        v.data() *= params.factor;
        flop_counter().add_multiply(static_cast<std::uint64_t>(v.data().size()));
        node.primal = std::move(v);
      }
      break;
    case NodeKind::mul:
      arity(2);
      require_kind(kind, inputs[0], ValueKind::scalar);
      require_kind(kind, inputs[1], ValueKind::scalar);
      flop_counter().add_multiply(1);
      node.primal = Value(in(0).scalar() * in(1).scalar());
      break;
    case NodeKind::dot:
      arity(2);
      require_kind(kind, inputs[0], ValueKind::vector);
      require_kind(kind, inputs[1], ValueKind::vector);
      node.primal = Value(adjblas::dot(in(0).data().col(0), in(1).data().col(0)));
      break;
    case NodeKind::gemv:
      arity(2);
      require_kind(kind, inputs[0], ValueKind::matrix);
      require_kind(kind, inputs[1], ValueKind::vector);
      node.primal = Value(adjblas::gemv(in(0).data(), in(1).data().col(0)));
      break;
    case NodeKind::gemm:
      arity(2);
      require_kind(kind, inputs[0], ValueKind::matrix);
      require_kind(kind, inputs[1], ValueKind::matrix);
      node.primal = Value(adjblas::gemm(in(0).data(), in(1).data()));
      break;
    case NodeKind::sandwich:
      arity(3);
      require_kind(kind, inputs[0], ValueKind::matrix);
      require_kind(kind, inputs[1], ValueKind::matrix);
      require_kind(kind, inputs[2], ValueKind::matrix);
      if (inputs[0].active() || inputs[2].active()) {
        throw TapeError("sandwich: outer factors must be passive");
      }
      if (in(0).data().cols() != in(1).data().rows() || in(1).data().cols() != in(2).data().rows()) {
        throw DimensionError("sandwich: nonconformable " + describe(inputs[0]) + " * " +
                             describe(inputs[1]) + " * " + describe(inputs[2]));
      }
      node.primal = Value(adjblas::gemm(adjblas::gemm(in(0).data(), in(1).data()), in(2).data()));
      break;
    case NodeKind::solve:
      arity(2);
      require_kind(kind, inputs[0], ValueKind::matrix);
      require_kind(kind, inputs[1], ValueKind::vector);
      if (in(0).data().rows() != in(0).data().cols()) {
        throw DimensionError("solve: matrix must be square, got " + describe(inputs[0]));
      }
      if (in(1).data().rows() != in(0).data().rows()) {
        throw DimensionError("solve: matrix " + describe(inputs[0]) + " with right-hand side " +
                             describe(inputs[1]));
      }
      node.factorization = lu_factor(in(0).data());
      node.primal = Value(lu_solve(*node.factorization, in(1).data().col(0)));
      break;
  }

  node.activity = Activity::passive;
  for (const auto& h : inputs) {
    node.inputs.push_back(h.id);
    if (h.active()) node.activity = Activity::active;
  }
  nodes_.push_back(std::move(node));
  return handle(nodes_.size() - 1);
}

NodeHandle Tape::add(const NodeHandle& a, const NodeHandle& b) {
  return record_op(NodeKind::add, std::array{a, b});
}

NodeHandle Tape::scale(double factor, const NodeHandle& x) {
  return record_op(NodeKind::scale, std::array{x}, OpParams{factor});
}

NodeHandle Tape::mul(const NodeHandle& a, const NodeHandle& x) {
  return record_op(NodeKind::mul, std::array{a, x});
}

NodeHandle Tape::dot(const NodeHandle& a, const NodeHandle& x) {
  return record_op(NodeKind::dot, std::array{a, x});
}

NodeHandle Tape::gemv(const NodeHandle& A, const NodeHandle& x) {
  return record_op(NodeKind::gemv, std::array{A, x});
}

NodeHandle Tape::gemm(const NodeHandle& A, const NodeHandle& X) {
  return record_op(NodeKind::gemm, std::array{A, X});
}

NodeHandle Tape::sandwich(const NodeHandle& A, const NodeHandle& X, const NodeHandle& B) {
  return record_op(NodeKind::sandwich, std::array{A, X, B});
}

NodeHandle Tape::solve(const NodeHandle& A, const NodeHandle& b) {
  return record_op(NodeKind::solve, std::array{A, b});
}

AdjointStore Tape::reverse(const NodeHandle& seed, const Value& seed_value) const {
  check_handle(seed);
  if (!seed.active()) throw TapeError("passive seed: cannot seed a passive variable");
  if (seed_value.shape() != seed.shape) {
    throw DimensionError("reverse: seed value " + to_string(seed_value.shape()) +
                         " does not match node " + to_string(seed.shape));
  }
  if (!seed_value.data().allFinite()) throw TapeError("reverse: non-finite seed");

  AdjointStore store;
  store.tape_id_ = id_;
  store.buffers_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].activity == Activity::active) store.buffers_[i] = Value::zeros(nodes_[i].primal.shape());
  }
  store.buffers_[seed.id] = seed_value;

  auto accumulate = [&](std::size_t id, const auto& contribution) {
    if (!store.buffers_[id]) return;  // passive input
    store.buffers_[id]->data() += contribution;
  };
  auto active = [&](std::size_t id) { return nodes_[id].activity == Activity::active; };

  for (std::size_t i = seed.id + 1; i-- > 0;) {
    const TapeNode& n = nodes_[i];
    if (n.kind == NodeKind::input || n.activity != Activity::active) continue;
    const DenseMatrix& adj = store.buffers_[i]->data();
    const auto& ins = n.inputs;
    auto primal = [&](std::size_t k) -> const DenseMatrix& { return nodes_[ins[k]].primal.data(); };

    switch (n.kind) {
      case NodeKind::input:
        break;
      case NodeKind::add:
        accumulate(ins[0], adj);
        accumulate(ins[1], adj);
        break;
      case NodeKind::scale:
        accumulate(ins[0], n.factor * adj);
        break;
      case NodeKind::mul: {
        const auto r = mul_adjoint(primal(0)(0, 0), primal(1)(0, 0), adj(0, 0));
        accumulate(ins[0], DenseMatrix::Constant(1, 1, r.a_adj));
        accumulate(ins[1], DenseMatrix::Constant(1, 1, r.x_adj));
        break;
      }
      case NodeKind::dot: {
        const auto r = dot_adjoint(primal(0).col(0), primal(1).col(0), adj(0, 0));
        accumulate(ins[0], r.a_adj);
        accumulate(ins[1], r.x_adj);
        break;
      }
      case NodeKind::gemv: {
        const auto r = gemv_adjoint(primal(0), primal(1).col(0), adj.col(0));
        if (active(ins[0])) accumulate(ins[0], r.A_adj);
        accumulate(ins[1], r.x_adj);
        break;
      }
      case NodeKind::gemm: {
        const auto r = gemm_adjoint(primal(0), primal(1), adj);
        if (active(ins[0])) accumulate(ins[0], r.A_adj);
        accumulate(ins[1], r.X_adj);
        break;
      }
      case NodeKind::sandwich:
        accumulate(ins[1], sandwich_adjoint(primal(0), primal(2), adj));
        break;
      case NodeKind::solve: {
        const auto r = solve_adjoint(*n.factorization, n.primal.data().col(0), adj.col(0));
        accumulate(ins[0], r.A_adj);
        accumulate(ins[1], r.b_adj);
        break;
      }
    }
  }
  return store;
}

std::string Tape::dump() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TapeNode& n = nodes_[i];
    out << i << ' ' << to_string(n.kind) << ' ' << to_string(n.primal.shape()) << ' ';
    if (n.inputs.empty()) {
      out << '-';
    } else {
      for (std::size_t k = 0; k < n.inputs.size(); ++k) out << (k ? "," : "") << n.inputs[k];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace adjblas
