#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "stiefel_qp/core.hpp"

namespace stiefel_qp::io {

/// Shortest decimal representation that reads back to the same double.
std::string format_double(double value);

/// CSV matrix format: a `rows,cols` header line followed by one line per
/// row, values comma-separated in shortest round-trip decimal.
void write_matrix_csv(std::ostream& os, const Matrix& m);
std::string matrix_to_csv(const Matrix& m);

/// Throws InvalidInput on malformed headers, ragged rows or bad numbers.
Matrix read_matrix_csv(std::istream& is);
Matrix read_matrix_file(const std::filesystem::path& path);
void write_matrix_file(const std::filesystem::path& path, const Matrix& m);

/// Writes to a sibling temporary and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace stiefel_qp::io
