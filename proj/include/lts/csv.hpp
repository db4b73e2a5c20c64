#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lts/errors.hpp"
#include "lts/model.hpp"

namespace lts {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

inline bool parse_double(const std::string& cell, double& value) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto res = std::from_chars(begin, end, value);
  return res.ec == std::errc() && res.ptr == end && !cell.empty();
}

}  // namespace detail

/// Reads a comma-separated numeric table. A single header row is auto
/// detected (any non-numeric cell in the first row). The response column is
/// selected by header name or by 1-based ordinal given as digits; it becomes
/// Y and the remaining columns become X, with a ones column prepended when
/// `intercept` is set.
inline Dataset load_csv(const std::string& path, const std::string& response = "1",
                        bool intercept = false) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open file: " + path);

  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    rows.push_back(detail::split_csv_line(line));
  }
  if (rows.empty()) throw CsvError(path + ": no rows");

  const std::size_t cols = rows.front().size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw CsvError(path + ": row " + std::to_string(r + 1) + " has " +
                     std::to_string(rows[r].size()) + " cells, expected " +
                     std::to_string(cols));
    }
  }
  if (cols < 2) throw CsvError(path + ": need at least two columns (response and one regressor)");

  double ignored = 0.0;
  const bool has_header =
      std::any_of(rows.front().begin(), rows.front().end(),
                  [&](const std::string& c) { return !detail::parse_double(c, ignored); });
  std::vector<std::string> header;
  std::size_t first_data_row = 0;
  if (has_header) {
    header = rows.front();
    first_data_row = 1;
    if (rows.size() == 1) throw CsvError(path + ": header only, no data rows");
  }

  // Resolve the response column: header name first, then 1-based ordinal.
  std::size_t response_col = cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == response) {
      response_col = c;
      break;
    }
  }
  if (response_col == cols) {
    std::size_t ordinal = 0;
    const char* begin = response.data();
    const char* end = begin + response.size();
    const auto res = std::from_chars(begin, end, ordinal);
    if (res.ec == std::errc() && res.ptr == end && ordinal >= 1 && ordinal <= cols) {
      response_col = ordinal - 1;
    } else {
      throw CsvError(path + ": response column \"" + response +
                     "\" matches no header name or column ordinal");
    }
  }

  const std::size_t n = rows.size() - first_data_row;
  const std::size_t p = cols - 1 + (intercept ? 1 : 0);
  Dataset data;
  data.has_intercept = intercept;
  data.X = Matrix(n, p);
  data.Y.resize(n);

  for (std::size_t r = 0; r < n; ++r) {
    const auto& cells = rows[r + first_data_row];
    std::size_t xcol = 0;
    if (intercept) data.X(r, xcol++) = 1.0;
    for (std::size_t c = 0; c < cols; ++c) {
      double value = 0.0;
      if (!detail::parse_double(cells[c], value)) {
        throw CsvError(path + ": non-numeric cell \"" + cells[c] + "\" at row " +
                       std::to_string(r + first_data_row + 1) + ", column " +
                       std::to_string(c + 1));
      }
      if (c == response_col) {
        data.Y[r] = value;
      } else {
        data.X(r, xcol++) = value;
      }
    }
  }

  data.validate();
  return data;
}

}  // namespace lts
