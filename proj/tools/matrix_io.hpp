#pragma once

#include <string>

#include "bwt/linalg.hpp"

namespace bwt::io {

// Reads {"matrix": [[...], ...]} JSON or comma-separated rows. The format is
// chosen by extension (.csv) and otherwise by content. Throws InvalidInput.
Matrix read_matrix(const std::string& path);
Matrix parse_matrix_json(const std::string& text);
Matrix parse_matrix_csv(const std::string& text);

// 17 significant digits, one row per line; byte-identical for equal input.
std::string format_matrix_json(const Matrix& m);
void write_matrix(const std::string& path, const Matrix& m);

std::string format_double(double x);

}  // namespace bwt::io
