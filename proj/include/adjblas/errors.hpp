#ifndef ADJBLAS_ERRORS_HPP
#define ADJBLAS_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adjblas {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform for the requested operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Raised by lu_factor when a pivot falls below the pivot floor.
class SingularMatrixError : public Error {
 public:
  explicit SingularMatrixError(std::size_t column)
      : Error("matrix is singular (pivot below threshold at column " +
              std::to_string(column) + ")"),
        column_(column) {}

  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class TapeError : public Error {
 public:
  using Error::Error;
};

/// Malformed matrix/vector text input. line() is 1-based; 0 means end of input.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace adjblas

#endif  // ADJBLAS_ERRORS_HPP
