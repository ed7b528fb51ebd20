#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace anodec::io {

/// Column-oriented numeric table with a header row.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  /// Throws Error if `name` is not a column.
  const std::vector<double>& column(const std::string& name) const;
};

/// Writes `table` as comma-separated text, numbers with 17 significant
/// digits so values round-trip exactly. Throws Error on I/O failure or
/// ragged columns.
void write_csv(const std::filesystem::path& path, const Table& table);

/// Parses a file written by write_csv.
Table read_csv(const std::filesystem::path& path);

}  // namespace anodec::io
