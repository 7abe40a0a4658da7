#ifndef ADJBLAS_VERIFY_REPORT_HPP
#define ADJBLAS_VERIFY_REPORT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace adjblas::verify {

struct VerificationReport {
  std::string check_name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const VerificationReport&, const VerificationReport&) = default;
};

/// Builds a report with passed = (residual <= tolerance). A NaN residual fails.
VerificationReport make_report(std::string check_name, double residual, double tolerance,
                               std::uint64_t trials, std::uint64_t seed);

/// One JSON object, no trailing newline. Reals use 17 significant digits;
/// non-finite residuals are written as null.
std::string to_json_line(const VerificationReport& r);
VerificationReport parse_json_line(const std::string& line);

void write_json_lines(std::ostream& out, const std::vector<VerificationReport>& reports);
std::vector<VerificationReport> read_json_lines(std::istream& in);

/// printf("%.17g") formatting shared by the machine-readable writers.
std::string format_real(double v);

}  // namespace adjblas::verify

#endif  // ADJBLAS_VERIFY_REPORT_HPP
