#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ridepool::csv {

inline std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // strip surrounding whitespace and a trailing CR
    size_t b = cell.find_first_not_of(" \t\r");
    size_t e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

inline double to_double(const std::string& s, const std::string& file, size_t row) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(file + ": row " + std::to_string(row) +
                             ": cannot parse number '" + s + "'");
  }
}

inline long long to_int(const std::string& s, const std::string& file, size_t row) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw std::runtime_error(file + ": row " + std::to_string(row) +
                             ": cannot parse integer '" + s + "'");
  return v;
}

// Reads a CSV file, verifies the header, and hands each data row (split into
// cells, with its 1-based row number) to `fn`.
template <typename Fn>
void read_file(const std::string& path, const std::vector<std::string>& header, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::string line;
  size_t row = 0;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  ++row;
  if (split_row(line) != header) {
    std::string want;
    for (size_t i = 0; i < header.size(); ++i) want += (i ? "," : "") + header[i];
    throw std::runtime_error(path + ": bad header, expected '" + want + "'");
  }
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto cells = split_row(line);
    if (cells.size() != header.size())
      throw std::runtime_error(path + ": row " + std::to_string(row) + ": expected " +
                               std::to_string(header.size()) + " cells, got " +
                               std::to_string(cells.size()));
    fn(row, cells);
  }
}

}  // namespace ridepool::csv
