// Acceptance gates. Prints one PASS/FAIL line per criterion and exits non-zero
// if any gate fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "adjblas/verify/suite.hpp"

using namespace adjblas::verify;

namespace {

struct Gate {
  std::string title;
  std::vector<std::string> groups;
  std::vector<std::string> reports;  // report names that must be present and pass
  std::uint64_t min_trials;
  double time_limit;  // seconds; 0 means no limit
};

const VerificationReport* find(const std::vector<VerificationReport>& rs, const std::string& name) {
  for (const auto& r : rs) {
    if (r.check_name == name) return &r;
  }
  return nullptr;
}

bool run_gate(int index, const Gate& g) {
  SuiteConfig cfg;
  cfg.checks = g.groups;
  cfg.seed = 42;

  const auto t0 = std::chrono::steady_clock::now();
  const auto rs = run_suite(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  bool ok = true;
  std::string detail;
  double worst = 0.0;
  for (const auto& name : g.reports) {
    const VerificationReport* r = find(rs, name);
    if (r == nullptr) {
      ok = false;
      detail += " missing " + name;
      continue;
    }
    if (!r->passed) {
      ok = false;
      detail += " failed " + name + " (residual " + format_real(r->residual) + ")";
    }
    if (r->trials < g.min_trials) {
      ok = false;
      detail += " " + name + " ran only " + std::to_string(r->trials) + " trials";
    }
    if (r->tolerance > 0.0) worst = std::max(worst, r->residual / r->tolerance);
  }
  if (g.time_limit > 0.0 && secs >= g.time_limit) {
    ok = false;
    detail += " too slow";
  }
  std::printf("%s  [%d/7] %-44s worst residual/tol %-10.3g %.3f s%s\n", ok ? "PASS" : "FAIL", index,
              g.title.c_str(), worst, secs, detail.c_str());
  return ok;
}

}  // namespace

int main() {
  const std::vector<Gate> gates = {
      {"adjoint identity, seven rule pairs",
       {"mul", "dot", "gemv", "gemm", "sandwich", "sum_sandwich", "solve"},
       {"identity/mul", "identity/dot", "identity/gemv", "identity/gemm", "identity/sandwich",
        "identity/sum_sandwich", "identity/solve"},
       100,
       5.0},
      {"tangent rules vs central differences",
       {"mul", "dot", "gemv", "gemm", "sandwich", "solve"},
       {"fd/mul_tangent", "fd/dot_tangent", "fd/gemv_tangent", "fd/gemm_tangent",
        "fd/sandwich_tangent", "fd/solve_tangent"},
       50,
       10.0},
      {"solve adjoint vs FD and scalar oracle",
       {"solve"},
       {"fd/solve_adjoint", "oracle/solve_adjoint"},
       20,
       0.0},
      {"tape reverse vs scalar oracle",
       {"tape"},
       {"oracle/tape"},
       25,
       0.0},
      {"factorization reuse flop growth",
       {"reuse"},
       {"flops/factor_exponent", "flops/adjoint_solve_exponent", "flops/reuse_single_factorization"},
       3,
       30.0},
      {"second-order solve adjoint",
       {"second_order"},
       {"fd/second_order_adjoint", "flops/second_order_factorizations"},
       10,
       0.0},
      {"level collapse at dimension one",
       {"collapse"},
       {"collapse/level"},
       1,
       0.0},
  };

  int failed = 0;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    if (!run_gate(static_cast<int>(i + 1), gates[i])) ++failed;
  }
  std::printf("%s: %d of %zu criteria passed\n", failed == 0 ? "ACCEPTED" : "REJECTED",
              static_cast<int>(gates.size()) - failed, gates.size());
  return failed == 0 ? 0 : 1;
}
