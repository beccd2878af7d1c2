#include "smcd/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace smcd::csv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

bool parse_number(std::string_view cell, double& value) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(value);
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

Matrix read_matrix(std::istream& in, bool has_header, const std::string& source) {
  std::vector<double> values;
  std::size_t cols = 0;
  Index rows = 0;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto cells = split(line);
    if (cols == 0) cols = cells.size();
    if (cells.size() != cols)
      throw DataError(source + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                      " fields, expected " + std::to_string(cols));
    for (std::size_t j = 0; j < cells.size(); ++j) {
      double v = 0.0;
      if (!parse_number(cells[j], v))
        throw DataError(source + ": line " + std::to_string(line_no) + ", column " + std::to_string(j + 1) + ": '" +
                        std::string(cells[j]) + "' is not a finite number");
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw DataError(source + ": no data rows");
  Matrix m(rows, static_cast<Index>(cols));
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = values[static_cast<std::size_t>(i) * cols + j];
  return m;
}

Matrix read_matrix_file(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_matrix(in, has_header, path);
}

void write_matrix(std::ostream& out, const Matrix& values, const std::vector<std::string>& header) {
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    out << '\n';
  }
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) out << (j ? "," : "") << format_double(values(i, j));
    out << '\n';
  }
}

void write_truth(std::ostream& out, const BinaryMap& truth) {
  out << "label\n";
  for (Index i = 0; i < truth.size(); ++i) out << static_cast<int>(truth[i]) << '\n';
}

BinaryMap read_truth(std::istream& in, const std::string& source) {
  const Matrix m = read_matrix(in, true, source);
  if (m.cols() != 1) throw DataError(source + ": truth file must have a single column");
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i) {
    if (m(i, 0) != 0.0 && m(i, 0) != 1.0)
      throw DataError(source + ": row " + std::to_string(i + 1) + " is not a 0/1 label");
    labels[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(m(i, 0));
  }
  return BinaryMap(std::move(labels));
}

void write_labels(std::ostream& out, const BinaryMap& labels, const Vector& depth) {
  if (depth.size() != labels.size()) throw ContractViolation("write_labels: depth and labels differ in length");
  out << "row_index,label,depth\n";
  for (Index i = 0; i < labels.size(); ++i)
    out << i << ',' << static_cast<int>(labels[i]) << ',' << format_double(depth[i]) << '\n';
}

}  // namespace smcd::csv
