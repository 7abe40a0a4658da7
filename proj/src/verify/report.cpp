#include "adjblas/verify/report.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "adjblas/errors.hpp"

namespace adjblas::verify {

VerificationReport make_report(std::string check_name, double residual, double tolerance,
                               std::uint64_t trials, std::uint64_t seed) {
  VerificationReport r;
  r.check_name = std::move(check_name);
  r.residual = residual;
  r.tolerance = tolerance;
  r.passed = residual <= tolerance;
  r.trials = trials;
  r.seed = seed;
  return r;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string json_real(double v) { return std::isfinite(v) ? format_real(v) : "null"; }

double real_field(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return v.get<double>();
}

}  // namespace

std::string to_json_line(const VerificationReport& r) {
  std::string out = "{\"check_name\":";
  out += nlohmann::json(r.check_name).dump();
  out += ",\"residual\":" + json_real(r.residual);
  out += ",\"tolerance\":" + json_real(r.tolerance);
  out += std::string(",\"passed\":") + (r.passed ? "true" : "false");
  out += ",\"trials\":" + std::to_string(r.trials);
  out += ",\"seed\":" + std::to_string(r.seed);
  out += "}";
  return out;
}

VerificationReport parse_json_line(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
    VerificationReport r;
    r.check_name = j.at("check_name").get<std::string>();
    r.residual = real_field(j, "residual");
    r.tolerance = real_field(j, "tolerance");
    r.passed = j.at("passed").get<bool>();
    r.trials = j.at("trials").get<std::uint64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid report line: ") + e.what());
  }
}

void write_json_lines(std::ostream& out, const std::vector<VerificationReport>& reports) {
  for (const auto& r : reports) out << to_json_line(r) << '\n';
}

std::vector<VerificationReport> read_json_lines(std::istream& in) {
  std::vector<VerificationReport> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_json_line(line));
  }
  return out;
}

}  // namespace adjblas::verify
