#include "adjblas/verify/scalar_oracle.hpp"

#include <string>

namespace adjblas::verify {

// ---- ScalarTape ----

ScalarTape::Var ScalarTape::push(double value, Var a, double da, Var b, double db) {
  if (a.id < 0 && b.id < 0) return constant(value);
  entries_.push_back({a.id, b.id, da, db});
  return {value, static_cast<std::ptrdiff_t>(entries_.size() - 1)};
}

ScalarTape::Var ScalarTape::variable(double v) {
  entries_.push_back({});
  return {v, static_cast<std::ptrdiff_t>(entries_.size() - 1)};
}

ScalarTape::Var ScalarTape::add(Var a, Var b) { return push(a.value + b.value, a, 1.0, b, 1.0); }

ScalarTape::Var ScalarTape::sub(Var a, Var b) { return push(a.value - b.value, a, 1.0, b, -1.0); }

ScalarTape::Var ScalarTape::mul(Var a, Var b) {
  return push(a.value * b.value, a, b.value, b, a.value);
}

ScalarTape::Var ScalarTape::div(Var a, Var b) {
  const double q = a.value / b.value;
  return push(q, a, 1.0 / b.value, b, -q / b.value);
}

std::vector<double> ScalarTape::adjoints(const std::vector<std::pair<Var, double>>& seeds) const {
  std::vector<double> adj(entries_.size(), 0.0);
  for (const auto& [v, s] : seeds) {
    if (v.id >= 0) adj[static_cast<std::size_t>(v.id)] += s;
  }
  for (std::size_t i = entries_.size(); i-- > 0;) {
    const Entry& e = entries_[i];
    const double a = adj[i];
    if (a == 0.0) continue;
    if (e.lhs >= 0) adj[static_cast<std::size_t>(e.lhs)] += e.d_lhs * a;
    if (e.rhs >= 0) adj[static_cast<std::size_t>(e.rhs)] += e.d_rhs * a;
  }
  return adj;
}

// ---- oracle ----

namespace {

using Var = ScalarTape::Var;

// Column-major grid of scalar variables.
struct VarMatrix {
  Index rows = 0;
  Index cols = 0;
  std::vector<Var> v;

  VarMatrix() = default;
  VarMatrix(Index r, Index c) : rows(r), cols(c), v(static_cast<std::size_t>(r * c)) {}
  Var& operator()(Index i, Index j) { return v[static_cast<std::size_t>(i + j * rows)]; }
  const Var& operator()(Index i, Index j) const { return v[static_cast<std::size_t>(i + j * rows)]; }
};

class Expander {
 public:
  explicit Expander(ScalarTape& st) : st_(st) {}

  VarMatrix leaf(const DenseMatrix& m, bool active) {
    VarMatrix out(m.rows(), m.cols());
    for (Index j = 0; j < m.cols(); ++j) {
      for (Index i = 0; i < m.rows(); ++i) {
        out(i, j) = active ? st_.variable(m(i, j)) : st_.constant(m(i, j));
      }
    }
    return out;
  }

  VarMatrix add(const VarMatrix& a, const VarMatrix& b) {
    VarMatrix out(a.rows, a.cols);
    for (std::size_t k = 0; k < a.v.size(); ++k) out.v[k] = st_.add(a.v[k], b.v[k]);
    return out;
  }

  VarMatrix scale(double c, const VarMatrix& a) {
    VarMatrix out(a.rows, a.cols);
    for (std::size_t k = 0; k < a.v.size(); ++k) out.v[k] = st_.mul(st_.constant(c), a.v[k]);
    return out;
  }

  // sum_i a_i x_i, accumulated left to right.
  Var inner(const VarMatrix& A, Index a_row, const VarMatrix& X, Index x_col) {
    Var s = st_.mul(A(a_row, 0), X(0, x_col));
    for (Index k = 1; k < A.cols; ++k) s = st_.add(s, st_.mul(A(a_row, k), X(k, x_col)));
    return s;
  }

  Var dot(const VarMatrix& a, const VarMatrix& x) {
    Var s = st_.mul(a.v[0], x.v[0]);
    for (std::size_t i = 1; i < a.v.size(); ++i) s = st_.add(s, st_.mul(a.v[i], x.v[i]));
    return s;
  }

  // Row by row.
  VarMatrix gemv(const VarMatrix& A, const VarMatrix& x) {
    VarMatrix y(A.rows, 1);
    for (Index i = 0; i < A.rows; ++i) y(i, 0) = inner(A, i, x, 0);
    return y;
  }

  // Column by column, each column a gemv.
  VarMatrix gemm(const VarMatrix& A, const VarMatrix& X) {
    VarMatrix Y(A.rows, X.cols);
    for (Index k = 0; k < X.cols; ++k) {
      for (Index i = 0; i < A.rows; ++i) Y(i, k) = inner(A, i, X, k);
    }
    return Y;
  }

  // Gaussian elimination in the frozen row order `perm`, then substitution.
  VarMatrix solve(const VarMatrix& A, const VarMatrix& b, const std::vector<Index>& perm) {
    const Index n = A.rows;
    VarMatrix M(n, n);
    VarMatrix y(n, 1);
    for (Index i = 0; i < n; ++i) {
      const Index src = perm[static_cast<std::size_t>(i)];
      for (Index j = 0; j < n; ++j) M(i, j) = A(src, j);
      y(i, 0) = b(src, 0);
    }
    for (Index k = 0; k < n; ++k) {
      for (Index i = k + 1; i < n; ++i) {
        const Var l = st_.div(M(i, k), M(k, k));
        for (Index j = k + 1; j < n; ++j) M(i, j) = st_.sub(M(i, j), st_.mul(l, M(k, j)));
        y(i, 0) = st_.sub(y(i, 0), st_.mul(l, y(k, 0)));
      }
    }
    VarMatrix x(n, 1);
    for (Index i = n - 1; i >= 0; --i) {
      Var s = y(i, 0);
      for (Index j = i + 1; j < n; ++j) s = st_.sub(s, st_.mul(M(i, j), x(j, 0)));
      x(i, 0) = st_.div(s, M(i, i));
    }
    // Back-substitution reads x internally; fresh copies keep those reads out of
    // the node adjoint.
    for (Index i = 0; i < n; ++i) x(i, 0) = st_.add(x(i, 0), st_.constant(0.0));
    return x;
  }

 private:
  ScalarTape& st_;
};

}  // namespace

const DenseMatrix& OracleAdjoints::adjoint(const NodeHandle& h) const {
  if (h.tape_id != tape_id_) throw TapeError("foreign handle: recorded on another tape");
  if (h.id >= adjoints_.size()) throw TapeError("unknown handle " + std::to_string(h.id));
  if (!adjoints_[h.id]) throw TapeError("passive variable has no adjoint");
  return *adjoints_[h.id];
}

OracleAdjoints scalar_oracle_adjoint(const Tape& tape, const NodeHandle& seed,
                                     const Value& seed_value) {
  const TapeNode& seed_node = tape.node(seed);
  if (seed_node.activity != Activity::active) throw TapeError("passive seed: cannot seed a passive variable");
  if (seed_value.shape() != seed_node.primal.shape()) {
    throw DimensionError("scalar_oracle_adjoint: seed value " + to_string(seed_value.shape()) +
                         " does not match node " + to_string(seed_node.primal.shape()));
  }

  ScalarTape st;
  Expander ex(st);
  const auto nodes = tape.nodes();
  std::vector<VarMatrix> vals(nodes.size());

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TapeNode& n = nodes[i];
    const auto& in = n.inputs;
    switch (n.kind) {
      case NodeKind::input:
        vals[i] = ex.leaf(n.primal.data(), n.activity == Activity::active);
        break;
      case NodeKind::add:
        vals[i] = ex.add(vals[in[0]], vals[in[1]]);
        break;
      case NodeKind::scale:
        vals[i] = ex.scale(n.factor, vals[in[0]]);
        break;
      case NodeKind::mul: {
        VarMatrix s(1, 1);
        s(0, 0) = st.mul(vals[in[0]](0, 0), vals[in[1]](0, 0));
        vals[i] = s;
        break;
      }
      case NodeKind::dot: {
        VarMatrix s(1, 1);
        s(0, 0) = ex.dot(vals[in[0]], vals[in[1]]);
        vals[i] = s;
        break;
      }
      case NodeKind::gemv:
        vals[i] = ex.gemv(vals[in[0]], vals[in[1]]);
        break;
      case NodeKind::gemm:
        vals[i] = ex.gemm(vals[in[0]], vals[in[1]]);
        break;
      case NodeKind::sandwich:
        vals[i] = ex.gemm(ex.gemm(vals[in[0]], vals[in[1]]), vals[in[2]]);
        break;
      case NodeKind::solve:
        if (!n.factorization) throw TapeError("solve node without factorization");
        vals[i] = ex.solve(vals[in[0]], vals[in[1]], n.factorization->perm());
        break;
      default:
        throw TapeError("scalar oracle: unsupported node kind " + std::string(to_string(n.kind)));
    }
  }

  std::vector<std::pair<Var, double>> seeds;
  const VarMatrix& out = vals[seed.id];
  for (Index j = 0; j < out.cols; ++j) {
    for (Index i = 0; i < out.rows; ++i) seeds.emplace_back(out(i, j), seed_value.data()(i, j));
  }
  const std::vector<double> adj = st.adjoints(seeds);

  OracleAdjoints result;
  result.tape_id_ = tape.id();
  result.adjoints_.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].activity != Activity::active) continue;
    const VarMatrix& v = vals[i];
    DenseMatrix a = DenseMatrix::Zero(v.rows, v.cols);
    for (Index c = 0; c < v.cols; ++c) {
      for (Index r = 0; r < v.rows; ++r) {
        const Var& var = v(r, c);
        if (var.id >= 0) a(r, c) = adj[static_cast<std::size_t>(var.id)];
      }
    }
    result.adjoints_[i] = std::move(a);
  }
  return result;
}

}  // namespace adjblas::verify
