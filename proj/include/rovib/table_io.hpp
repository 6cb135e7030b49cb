#pragma once

// Whitespace-separated numeric tables with '#' comments.

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rovib {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Rows of exactly `ncols` finite numbers. Text after '#' is ignored.
inline std::vector<std::vector<double>> read_columns(const std::string& path, std::size_t ncols) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ss(line);
    std::vector<double> row;
    std::string tok;
    while (ss >> tok) {
      try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size() || !std::isfinite(v)) throw std::invalid_argument(tok);
        row.push_back(v);
      } catch (const std::exception&) {
        throw InputError(path + ":" + std::to_string(lineno) + ": bad number '" + tok + "'");
      }
    }
    if (row.empty()) continue;
    if (row.size() != ncols) {
      throw InputError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(ncols) +
                       " columns, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("'" + path + "' contains no data");
  return rows;
}

}  // namespace rovib
