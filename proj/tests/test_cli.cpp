#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "adjblas/bench.hpp"
#include "adjblas/verify/report.hpp"

using namespace adjblas;

namespace {

const std::string kData = ADJBLAS_TEST_DATA;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return kData + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int count_of(const std::string& s, const std::string& part) {
  int n = 0;
  for (auto p = s.find(part); p != std::string::npos; p = s.find(part, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("verify") {
  const Result all = run({"verify", "--all", "--seed", "42"});
  CHECK(all.code == 0);
  CHECK(count_of(all.out, "PASS") >= 10);
  CHECK(count_of(all.out, "FAIL") == 0);

  const Result solve = run({"verify", "--check", "solve", "--trials", "200"});
  CHECK(solve.code == 0);
  CHECK(solve.out.find("identity/solve") != std::string::npos);
  CHECK(solve.out.find("identity/mul") == std::string::npos);
  CHECK(solve.out.find("trials 200") != std::string::npos);

  const Result bogus = run({"verify", "--check", "bogus"});
  CHECK(bogus.code == 2);
  CHECK(bogus.err.find("unknown check: bogus") != std::string::npos);

  SUBCASE("forced failure exits 1") {
    const Result r = run({"verify", "--check", "dot", "--tol", "identity/dot=0"});
    CHECK(r.code == 1);
    CHECK(r.out.find("FAIL") != std::string::npos);
  }

  SUBCASE("usage errors") {
    CHECK(run({"verify", "--tol", "nonsense"}).code == 2);
    CHECK(run({"verify", "--seed", "abc"}).code == 2);
    CHECK(run({"verify", "--max-dim", "0"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"--help"}).code == 0);
  }

  SUBCASE("json lines round trip") {
    const std::string path = "cli_verify.jsonl";
    CHECK(run({"verify", "--check", "mul,collapse", "--json", path}).code == 0);
    const std::string text = slurp(path);
    std::istringstream in(text);
    const auto reports = verify::read_json_lines(in);
    CHECK(reports.size() == 3);
    std::ostringstream again;
    verify::write_json_lines(again, reports);
    CHECK(again.str() == text);
    std::remove(path.c_str());
  }

  SUBCASE("seed from the environment") {
    setenv("ADJBLAS_SEED", "7", 1);
    const Result r = run({"verify", "--check", "mul"});
    unsetenv("ADJBLAS_SEED");
    CHECK(r.out.find("(seed 7)") != std::string::npos);
  }
}

TEST_CASE("bench") {
  const Result r = run({"bench", "--sizes", "64,128,256", "-k", "16"});
  CHECK(r.code == 0);
  CHECK(r.out.find("fitted flop growth") != std::string::npos);
  CHECK(r.out.find("note:") == std::string::npos);

  const Result small = run({"bench", "--sizes", "2,4"});
  CHECK(small.code == 0);
  CHECK(small.out.find("note: sizes below 16") != std::string::npos);

  CHECK(run({"bench", "--sizes", "1,8"}).code == 2);
  CHECK(run({"bench", "--sizes", "8"}).code == 2);
  CHECK(run({"bench", "-k", "0"}).code == 2);

  SUBCASE("csv round trip") {
    const std::string path = "cli_bench.csv";
    CHECK(run({"bench", "--sizes", "4,8", "-k", "1", "--csv", path}).code == 0);
    const std::string text = slurp(path);
    std::istringstream in(text);
    const auto records = read_bench_csv(in);
    REQUIRE(records.size() == 4);
    // k = 1: the two runs differ by exactly one factorization.
    CHECK(records[1].factor_flops - records[0].factor_flops == records[0].factor_flops);
    std::ostringstream again;
    write_bench_csv(again, records);
    CHECK(again.str() == text);
    std::remove(path.c_str());
  }
}

TEST_CASE("demo") {
  const Result r = run({"demo", "--matrix", data("diag24.txt"), "--rhs", data("rhs24.txt"),
                        "--seed-vector", data("ones2.txt")});
  CHECK(r.code == 0);
  CHECK(r.out.find("x     = (1, 1)") != std::string::npos);
  CHECK(r.out.find("b_adj = (0.5, 0.25)") != std::string::npos);
  CHECK(r.out.find("-0.5,         -0.5]") != std::string::npos);
  CHECK(r.out.find("-0.25,        -0.25]") != std::string::npos);

  SUBCASE("unit seed on the identity") {
    const std::string json = "cli_demo.json";
    const Result u = run({"demo", "--matrix", data("eye2.txt"), "--rhs", data("rhs_eye.txt"),
                          "--seed-unit", "0", "--json", json});
    CHECK(u.code == 0);
    // -e0 x^T keeps its signed zero in the machine format.
    CHECK(slurp(json) == "{\"x\":[3,-5],\"b_adj\":[1,0],\"A_adj\":[[-3,5],[-0,0]]}\n");
    std::remove(json.c_str());
  }

  SUBCASE("second order") {
    const Result s = run({"demo", "--matrix", data("diag24.txt"), "--rhs", data("rhs24.txt"),
                          "--seed-vector", data("ones2.txt"), "--second-order", "--a-dot",
                          data("a_dot.txt"), "--b-dot", data("b_dot.txt"), "--xadj-dot",
                          data("xadj_dot.txt")});
    CHECK(s.code == 0);
    CHECK(s.out.find("b_adj_dot") != std::string::npos);
    CHECK(s.out.find("A_adj_dot") != std::string::npos);
  }

  SUBCASE("failures") {
    const Result sing = run({"demo", "--matrix", data("singular.txt"), "--rhs", data("rhs24.txt"),
                             "--seed-unit", "0"});
    CHECK(sing.code == 3);
    CHECK(sing.err.find("matrix is singular (pivot below threshold at column 1)") != std::string::npos);

    const Result bad = run({"demo", "--matrix", data("bad_entry.txt"), "--rhs", data("rhs24.txt"),
                            "--seed-unit", "0"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("line 2") != std::string::npos);

    CHECK(run({"demo", "--matrix", data("diag24.txt"), "--rhs", data("rhs24.txt")}).code == 2);
    CHECK(run({"demo", "--matrix", data("diag24.txt"), "--rhs", data("rhs24.txt"), "--seed-unit", "5"}).code == 2);
    CHECK(run({"demo", "--matrix", data("diag24.txt"), "--rhs", data("rhs_eye.txt"), "--seed-vector",
               data("diag24.txt")}).code == 2);
    CHECK(run({"demo", "--matrix", data("missing.txt"), "--rhs", data("rhs24.txt"), "--seed-unit", "0"}).code == 2);
  }
}
