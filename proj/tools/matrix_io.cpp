#include "matrix_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace bwt::io {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open matrix file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Matrix(0, 0);
  const std::size_t cols = rows.front().size();
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols)
      throw InvalidInput("matrix is not rectangular: row " + std::to_string(i + 1) + " has " +
                         std::to_string(rows[i].size()) + " entries, expected " + std::to_string(cols));
    for (std::size_t j = 0; j < cols; ++j) {
      if (!std::isfinite(rows[i][j])) throw InvalidInput("matrix entries must be finite");
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return m;
}

}  // namespace

std::string format_double(double x) {
  if (x == 0.0) return "0";  // also folds -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Matrix parse_matrix_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
  const nlohmann::json* payload = &doc;
  if (doc.is_object()) {
    if (!doc.contains("matrix")) throw InvalidInput("JSON matrix file needs a \"matrix\" field");
    payload = &doc.at("matrix");
  }
  if (!payload->is_array()) throw InvalidInput("\"matrix\" must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& row : *payload) {
    if (!row.is_array()) throw InvalidInput("matrix rows must be arrays");
    std::vector<double> r;
    for (const auto& v : row) {
      if (!v.is_number()) throw InvalidInput("matrix entries must be numbers");
      r.push_back(v.get<double>());
    }
    rows.push_back(std::move(r));
  }
  return from_rows(rows);
}

Matrix parse_matrix_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> r;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw InvalidInput("CSV entry '" + cell + "' is not a number");
      }
      if (cell.find_first_not_of(" \t", used) != std::string::npos)
        throw InvalidInput("CSV entry '" + cell + "' is not a number");
      r.push_back(v);
    }
    rows.push_back(std::move(r));
  }
  return from_rows(rows);
}

Matrix read_matrix(const std::string& path) {
  const std::string text = slurp(path);
  if (ends_with(path, ".csv")) return parse_matrix_csv(text);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '['))
    return parse_matrix_json(text);
  return parse_matrix_csv(text);
}

std::string format_matrix_json(const Matrix& m) {
  std::string out = "{\"matrix\": [";
  for (Index i = 0; i < m.rows(); ++i) {
    out += i == 0 ? "\n  [" : ",\n  [";
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ", ";
      out += format_double(m(i, j));
    }
    out += "]";
  }
  out += m.rows() > 0 ? "\n]}\n" : "]}\n";
  return out;
}

void write_matrix(const std::string& path, const Matrix& m) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write '" + path + "'");
  f << format_matrix_json(m);
}

}  // namespace bwt::io
