#ifndef ADJBLAS_MATRIX_IO_HPP
#define ADJBLAS_MATRIX_IO_HPP

// Plain-text matrix literals:
//
//   rows cols
//   a00 a01 ...
//   a10 a11 ...
//
// Blank lines are skipped. A vector is an n x 1 (or 1 x n) matrix.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "adjblas/types.hpp"

namespace adjblas {

DenseMatrix read_matrix(std::istream& in);
DenseMatrix read_matrix_file(const std::filesystem::path& path);
DenseMatrix parse_matrix(const std::string& text);

/// Accepts either orientation and returns a column vector.
DenseVector read_vector_file(const std::filesystem::path& path);
DenseVector parse_vector(const std::string& text);

/// Writes in the same format with 17 significant digits, so parsing the
/// output reproduces the values exactly.
void write_matrix(std::ostream& out, const DenseMatrix& m);
std::string format_matrix(const DenseMatrix& m);

}  // namespace adjblas

#endif  // ADJBLAS_MATRIX_IO_HPP
