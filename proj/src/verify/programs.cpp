#include "adjblas/verify/programs.hpp"

#include <algorithm>
#include <vector>

namespace adjblas::verify {

int program_depth(const Tape& tape, const NodeHandle& h) {
  const auto nodes = tape.nodes();
  std::vector<int> depth(h.id + 1, 0);
  for (std::size_t i = 0; i <= h.id; ++i) {
    for (std::size_t in : nodes[i].inputs) depth[i] = std::max(depth[i], depth[in] + 1);
  }
  return depth[h.id];
}

bool has_fan_out(const Tape& tape) {
  std::vector<int> uses(tape.size(), 0);
  for (const auto& n : tape.nodes()) {
    for (std::size_t in : n.inputs) {
      if (++uses[in] > 1) return true;
    }
  }
  return false;
}

namespace {

class Builder {
 public:
  Builder(Rng& rng, Tape& tape, Index max_dim) : rng_(rng), tape_(tape), max_dim_(max_dim) {}

  Index dim() { return rng_.integer(1, max_dim_); }
  Activity activity() { return rng_.coin(0.7) ? Activity::active : Activity::passive; }

  NodeHandle fresh(const Shape& s, Activity a) {
    NodeHandle h;
    switch (s.kind) {
      case ValueKind::scalar: h = tape_.record_input(Value(rng_.uniform()), a); break;
      case ValueKind::vector: h = tape_.record_input(Value(rng_.vector(s.rows)), a); break;
      case ValueKind::matrix: h = tape_.record_input(Value(rng_.matrix(s.rows, s.cols)), a); break;
    }
    return h;
  }

  NodeHandle well_conditioned(Index n) {
    // Reuse an existing system matrix when one fits; that is a fan-out on A.
    std::vector<NodeHandle> fits;
    for (const auto& h : systems_) {
      if (h.shape.rows == n) fits.push_back(h);
    }
    if (!fits.empty() && rng_.coin(0.6)) return fits[static_cast<std::size_t>(rng_.integer(0, static_cast<Index>(fits.size()) - 1))];
    const NodeHandle h = tape_.record_input(Value(rng_.well_conditioned(n)), activity());
    systems_.push_back(h);
    return h;
  }

  /// An operand of the given shape: a recorded node or a fresh input.
  NodeHandle operand(const Shape& s) {
    std::vector<NodeHandle> fits;
    for (std::size_t i = 0; i < tape_.size(); ++i) {
      const NodeHandle h = tape_.handle(i);
      if (h.shape == s) fits.push_back(h);
    }
    if (!fits.empty() && rng_.coin(0.5)) {
      return fits[static_cast<std::size_t>(rng_.integer(0, static_cast<Index>(fits.size()) - 1))];
    }
    return fresh(s, activity());
  }

  static Shape vec(Index n) { return {ValueKind::vector, n, 1}; }
  static Shape mat(Index r, Index c) { return {ValueKind::matrix, r, c}; }
  static Shape scal() { return {ValueKind::scalar, 1, 1}; }

  NodeHandle extend(const NodeHandle& c) {
    const Index r = c.shape.rows;
    const Index cc = c.shape.cols;
    switch (c.shape.kind) {
      case ValueKind::scalar:
        switch (rng_.integer(0, 2)) {
          case 0: return tape_.scale(rng_.uniform(-2.0, 2.0), c);
          case 1: return tape_.mul(c, operand(scal()));
          default: return tape_.add(c, operand(scal()));
        }
      case ValueKind::vector:
        switch (rng_.integer(0, 4)) {
          case 0: return tape_.scale(rng_.uniform(-2.0, 2.0), c);
          case 1: return tape_.add(c, operand(vec(r)));
          case 2: return tape_.gemv(operand(mat(dim(), r)), c);
          case 3: return tape_.solve(well_conditioned(r), c);
          default: return tape_.dot(c, operand(vec(r)));
        }
      case ValueKind::matrix:
        switch (rng_.integer(0, 5)) {
          case 0: return tape_.scale(rng_.uniform(-2.0, 2.0), c);
          case 1: return tape_.add(c, operand(mat(r, cc)));
          case 2: return tape_.gemm(c, operand(mat(cc, dim())));
          case 3: return tape_.gemm(operand(mat(dim(), r)), c);
          case 4: return tape_.gemv(c, operand(vec(cc)));
          default:
            return tape_.sandwich(fresh(mat(dim(), r), Activity::passive), c,
                                  fresh(mat(cc, dim()), Activity::passive));
        }
    }
    return c;
  }

  NodeHandle reduce(NodeHandle c) {
    if (c.shape.kind == ValueKind::matrix) c = tape_.gemv(c, operand(vec(c.shape.cols)));
    if (c.shape.kind == ValueKind::vector) c = tape_.dot(c, operand(vec(c.shape.rows)));
    return c;
  }

  NodeHandle track_system(NodeHandle h) {
    systems_.push_back(h);
    return h;
  }

 private:
  Rng& rng_;
  Tape& tape_;
  Index max_dim_;
  std::vector<NodeHandle> systems_;
};

}  // namespace

RandomProgram random_program(Rng& rng, const ProgramOptions& options) {
  if (options.max_depth < 4) throw Error("random_program: max_depth must be at least 4");
  RandomProgram p;
  Builder b(rng, p.tape, std::max<Index>(options.max_dim, 1));

  const Index n = b.dim();
  const NodeHandle A = b.track_system(p.tape.record_input(Value(rng.well_conditioned(n)), Activity::active));
  const NodeHandle rhs = p.tape.record_input(Value(rng.vector(n)), Activity::active);
  NodeHandle chain = p.tape.solve(A, rhs);

  // solve (1) + body + reduction (<= 2) + optional fan-out add (1).
  const int body = static_cast<int>(rng.integer(0, options.max_depth - 4));
  for (int i = 0; i < body; ++i) chain = b.extend(chain);
  chain = b.reduce(chain);
  if (!has_fan_out(p.tape)) chain = p.tape.add(chain, chain);

  p.output = chain;
  p.seed = Value(rng.uniform(0.5, 1.5) * (rng.coin() ? 1.0 : -1.0));
  p.depth = program_depth(p.tape, chain);
  p.has_fan_out = has_fan_out(p.tape);
  p.has_solve = std::any_of(p.tape.nodes().begin(), p.tape.nodes().end(),
                            [](const TapeNode& nd) { return nd.kind == NodeKind::solve; });
  return p;
}

}  // namespace adjblas::verify
