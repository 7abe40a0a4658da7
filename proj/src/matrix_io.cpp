#include "adjblas/matrix_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace adjblas {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

long parse_count(const std::string& tok, std::size_t line_no) {
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(tok.c_str(), &end, 10);
  if (errno != 0 || end == tok.c_str() || *end != '\0' || v < 0) {
    throw ParseError(line_no, "invalid dimension '" + tok + "'");
  }
  return v;
}

double parse_real(const std::string& tok, std::size_t line_no) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
    throw ParseError(line_no, "invalid number '" + tok + "'");
  }
  return v;
}

}  // namespace

DenseMatrix read_matrix(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  long rows = 0;
  long cols = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    const auto tokens = split_ws(line);
    if (tokens.size() != 2) throw ParseError(line_no, "expected header 'rows cols'");
    rows = parse_count(tokens[0], line_no);
    cols = parse_count(tokens[1], line_no);
    have_header = true;
    break;
  }
  if (!have_header) throw ParseError(0, "empty input, expected header 'rows cols'");

  DenseMatrix m(rows, cols);
  long r = 0;
  while (r < rows && std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    const auto tokens = split_ws(line);
    if (static_cast<long>(tokens.size()) != cols) {
      throw ParseError(line_no, "expected " + std::to_string(cols) + " values, found " +
                                    std::to_string(tokens.size()));
    }
    for (long c = 0; c < cols; ++c) m(r, c) = parse_real(tokens[static_cast<std::size_t>(c)], line_no);
    ++r;
  }
  if (r < rows) {
    throw ParseError(0, "unexpected end of input after " + std::to_string(r) + " of " +
                            std::to_string(rows) + " rows");
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!is_blank(line)) throw ParseError(line_no, "trailing data after matrix");
  }
  return m;
}

DenseMatrix parse_matrix(const std::string& text) {
  std::istringstream in(text);
  return read_matrix(in);
}

DenseMatrix read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_matrix(in);
}

namespace {

DenseVector as_vector(const DenseMatrix& m) {
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw ParseError(1, "expected a vector, got a " + shape_string(m) + " matrix");
}

}  // namespace

DenseVector parse_vector(const std::string& text) { return as_vector(parse_matrix(text)); }

DenseVector read_vector_file(const std::filesystem::path& path) {
  return as_vector(read_matrix_file(path));
}

void write_matrix(std::ostream& out, const DenseMatrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << (j == 0 ? "" : " ") << buf;
    }
    out << '\n';
  }
}

std::string format_matrix(const DenseMatrix& m) {
  std::ostringstream out;
  write_matrix(out, m);
  return out.str();
}

}  // namespace adjblas
