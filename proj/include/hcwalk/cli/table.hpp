#pragma once

#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hcwalk/errors.hpp"

namespace hcwalk::cli {

/// Column-major intent, row-major storage: one row per sample.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Twelve significant digits; -0 prints as 0 so reruns compare byte for byte.
[[nodiscard]] inline std::string format_value(double v) {
  if (v == 0.0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw Error("table row width does not match its header");
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_value(row[c]);
    out << '\n';
  }
}

[[nodiscard]] inline std::string to_csv(const Table& table) {
  std::ostringstream out;
  write_csv(out, table);
  return out.str();
}

}  // namespace hcwalk::cli
