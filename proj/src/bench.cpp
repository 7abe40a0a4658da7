#include "adjblas/bench.hpp"

#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "adjblas/adjoint.hpp"
#include "adjblas/flops.hpp"
#include "adjblas/lu.hpp"
#include "adjblas/verify/random.hpp"
#include "adjblas/verify/report.hpp"

namespace adjblas {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Keeps the optimizer from discarding results.
volatile double g_sink = 0.0;

void bench_size(Index n, const BenchConfig& cfg, std::vector<BenchRecord>& out) {
  verify::Rng rng(verify::derive_seed(cfg.seed, "bench/" + std::to_string(n)));
  const DenseMatrix A = rng.well_conditioned(n);
  const DenseVector b = rng.vector(n);
  std::vector<DenseVector> seeds;
  for (std::uint64_t i = 0; i < cfg.adjoint_count; ++i) seeds.push_back(rng.vector(n));
  const double k = static_cast<double>(cfg.adjoint_count);

  BenchRecord reuse{n, 0, 0, 0.0, 0.0, true};
  BenchRecord fresh{n, 0, 0, 0.0, 0.0, false};

  for (std::uint64_t rep = 0; rep < cfg.repetitions; ++rep) {
    // With reuse: one factorization serves the primal and all k adjoints.
    {
      FlopCounter counter;
      ScopedFlopCounter scope(counter);
      auto t0 = Clock::now();
      const auto F = lu_factor(A);
      const double t_factor = seconds_since(t0);
      const DenseVector x = lu_solve(F, b);
      const FlopCounts before = counter.snapshot();
      t0 = Clock::now();
      for (const auto& s : seeds) g_sink = g_sink + solve_adjoint(F, x, s).b_adj(0);
      const double t_adj = seconds_since(t0);
      const FlopCounts adj = counter.snapshot() - before;
      reuse.factor_flops = counter.factor_flops();
      reuse.solve_flops_per_adjoint = adj.solve / cfg.adjoint_count;
      reuse.wall_time_factor += t_factor / static_cast<double>(cfg.repetitions);
      reuse.wall_time_adjoint_solve += t_adj / k / static_cast<double>(cfg.repetitions);
    }
    // Without reuse: every adjoint solve starts from a fresh factorization.
    {
      FlopCounter counter;
      ScopedFlopCounter scope(counter);
      auto t0 = Clock::now();
      const auto F = lu_factor(A);
      double t_factor = seconds_since(t0);
      const DenseVector x = lu_solve(F, b);
      double t_adj = 0.0;
      std::uint64_t adjoint_solve_flops = 0;
      for (const auto& s : seeds) {
        t0 = Clock::now();
        const auto G = lu_factor(A);
        t_factor += seconds_since(t0);
        const FlopCounts before = counter.snapshot();
        t0 = Clock::now();
        g_sink = g_sink + solve_adjoint(G, x, s).b_adj(0);
        t_adj += seconds_since(t0);
        adjoint_solve_flops += (counter.snapshot() - before).solve;
      }
      fresh.factor_flops = counter.factor_flops();
      fresh.solve_flops_per_adjoint = adjoint_solve_flops / cfg.adjoint_count;
      fresh.wall_time_factor += t_factor / (k + 1.0) / static_cast<double>(cfg.repetitions);
      fresh.wall_time_adjoint_solve += t_adj / k / static_cast<double>(cfg.repetitions);
    }
  }
  out.push_back(reuse);
  out.push_back(fresh);
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

}  // namespace

std::vector<BenchRecord> run_bench(const BenchConfig& config) {
  if (config.sizes.empty()) throw Error("bench: no sizes given");
  for (Index n : config.sizes) {
    if (n < 2) throw Error("bench: size " + std::to_string(n) + " is too small (n must be >= 2)");
  }
  if (config.adjoint_count < 1) throw Error("bench: adjoint count must be at least 1");
  if (config.repetitions < 1) throw Error("bench: repetitions must be at least 1");
  std::vector<BenchRecord> out;
  for (Index n : config.sizes) bench_size(n, config, out);
  return out;
}

double fit_exponent(const std::vector<Index>& n, const std::vector<double>& value) {
  if (n.size() != value.size() || n.size() < 2) throw Error("fit_exponent: need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double x = std::log(static_cast<double>(n[i]));
    const double y = std::log(value[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw Error("fit_exponent: sizes must be distinct");
  return (m * sxy - sx * sy) / denom;
}

BenchExponents fit_bench_exponents(const std::vector<BenchRecord>& records) {
  std::vector<Index> n;
  std::vector<double> factor, solve;
  std::set<Index> distinct;
  for (const auto& r : records) {
    if (!r.reuse) continue;
    n.push_back(r.n);
    distinct.insert(r.n);
    factor.push_back(static_cast<double>(r.factor_flops));
    solve.push_back(static_cast<double>(r.solve_flops_per_adjoint));
  }
  if (distinct.size() < 2) throw Error("bench: need at least two distinct sizes to fit exponents");
  return {fit_exponent(n, factor), fit_exponent(n, solve)};
}

// ---- serialization ----

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << kBenchCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.n << ',' << r.factor_flops << ',' << r.solve_flops_per_adjoint << ','
        << verify::format_real(r.wall_time_factor) << ','
        << verify::format_real(r.wall_time_adjoint_solve) << ',' << bool_str(r.reuse) << '\n';
  }
}

std::vector<BenchRecord> read_bench_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kBenchCsvHeader) throw Error("bench csv: missing header");
  std::vector<BenchRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 6 || (f[5] != "true" && f[5] != "false")) {
      throw ParseError(line_no, "malformed bench record");
    }
    try {
      BenchRecord r;
      r.n = std::stoll(f[0]);
      r.factor_flops = std::stoull(f[1]);
      r.solve_flops_per_adjoint = std::stoull(f[2]);
      r.wall_time_factor = std::stod(f[3]);
      r.wall_time_adjoint_solve = std::stod(f[4]);
      r.reuse = f[5] == "true";
      out.push_back(r);
    } catch (const std::logic_error&) {
      throw ParseError(line_no, "malformed bench record");
    }
  }
  return out;
}

std::string to_json_line(const BenchRecord& r) {
  return "{\"n\":" + std::to_string(r.n) + ",\"factor_flops\":" + std::to_string(r.factor_flops) +
         ",\"solve_flops_per_adjoint\":" + std::to_string(r.solve_flops_per_adjoint) +
         ",\"wall_time_factor\":" + verify::format_real(r.wall_time_factor) +
         ",\"wall_time_adjoint_solve\":" + verify::format_real(r.wall_time_adjoint_solve) +
         ",\"reuse\":" + bool_str(r.reuse) + "}";
}

BenchRecord parse_bench_json_line(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    BenchRecord r;
    r.n = j.at("n").get<Index>();
    r.factor_flops = j.at("factor_flops").get<std::uint64_t>();
    r.solve_flops_per_adjoint = j.at("solve_flops_per_adjoint").get<std::uint64_t>();
    r.wall_time_factor = j.at("wall_time_factor").get<double>();
    r.wall_time_adjoint_solve = j.at("wall_time_adjoint_solve").get<double>();
    r.reuse = j.at("reuse").get<bool>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid bench record: ") + e.what());
  }
}

void write_bench_json_lines(std::ostream& out, const std::vector<BenchRecord>& records) {
  for (const auto& r : records) out << to_json_line(r) << '\n';
}

std::vector<BenchRecord> read_bench_json_lines(std::istream& in) {
  std::vector<BenchRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(parse_bench_json_line(line));
  }
  return out;
}

}  // namespace adjblas
