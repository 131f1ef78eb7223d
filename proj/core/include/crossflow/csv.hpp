#pragma once

#include <optional>
#include <string>
#include <vector>

namespace crossflow::csv {

/// Column-oriented table with optional (missing) cells. Doubles are
/// round-tripped with max_digits10 precision so write/read is bit exact.
struct Table {
  std::vector<std::string> columns;
  // rows[r][c]; nullopt = empty cell
  std::vector<std::vector<std::optional<double>>> rows;

  std::size_t n_rows() const { return rows.size(); }
  int column_index(const std::string& name) const;
};

void write(const Table& table, const std::string& path);
Table read(const std::string& path);

std::string format_double(double v);

}  // namespace crossflow::csv
