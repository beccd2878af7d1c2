#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "smcd/types.hpp"

namespace smcd::csv {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Comma-separated numeric matrix, one observation per line. Blank lines
/// are skipped. Throws DataError naming the line (and column) on ragged
/// rows or non-numeric cells.
Matrix read_matrix(std::istream& in, bool has_header, const std::string& source = "<stream>");
Matrix read_matrix_file(const std::string& path, bool has_header);

void write_matrix(std::ostream& out, const Matrix& values, const std::vector<std::string>& header = {});

/// Single-column 0/1 file with header `label`.
void write_truth(std::ostream& out, const BinaryMap& truth);
BinaryMap read_truth(std::istream& in, const std::string& source = "<stream>");

/// Header `row_index,label,depth`.
void write_labels(std::ostream& out, const BinaryMap& labels, const Vector& depth);

}  // namespace smcd::csv
