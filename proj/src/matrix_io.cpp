#include "stiefel_qp/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace stiefel_qp::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view token, std::size_t line_no) {
  T value{};
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (token.empty() || ec != std::errc() || ptr != last) {
    throw InvalidInput("line " + std::to_string(line_no) + ": cannot parse '" +
                       std::string(token) + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_matrix_csv(std::ostream& os, const Matrix& m) {
  os << m.rows() << ',' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) os << ',';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

std::string matrix_to_csv(const Matrix& m) {
  std::ostringstream os;
  write_matrix_csv(os, m);
  return os.str();
}

Matrix read_matrix_csv(std::istream& is) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line)) {
    throw InvalidInput("empty matrix file");
  }
  const auto header = split(line);
  if (header.size() != 2) {
    throw InvalidInput("matrix header must be 'rows,cols'");
  }
  const long rows = parse_number<long>(header[0], line_no);
  const long cols = parse_number<long>(header[1], line_no);
  if (rows < 1 || cols < 1) {
    throw InvalidInput("matrix dimensions must be positive");
  }
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    ++line_no;
    if (!std::getline(is, line)) {
      throw InvalidInput("expected " + std::to_string(rows) + " rows, got " +
                         std::to_string(i));
    }
    const auto fields = split(line);
    if (static_cast<long>(fields.size()) != cols) {
      throw InvalidInput("line " + std::to_string(line_no) + ": expected " +
                         std::to_string(cols) + " values");
    }
    for (long j = 0; j < cols; ++j) m(i, j) = parse_number<double>(fields[j], line_no);
  }
  while (std::getline(is, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      throw InvalidInput("line " + std::to_string(line_no) +
                         ": trailing data after the last row");
    }
  }
  require_dense(m, "matrix file");
  return m;
}

Matrix read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidInput("cannot open " + path.string());
  }
  try {
    return read_matrix_csv(in);
  } catch (const InvalidInput& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

void write_matrix_file(const std::filesystem::path& path, const Matrix& m) {
  write_file_atomic(path, matrix_to_csv(m));
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write " + tmp.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace stiefel_qp::io
