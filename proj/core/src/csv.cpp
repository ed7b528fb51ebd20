#include "anodec/io/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "anodec/odecore/errors.hpp"

namespace anodec::io {

const std::vector<double>& Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return columns.at(i);
  }
  throw Error("no column named '" + name + "'");
}

void write_csv(const std::filesystem::path& path, const Table& table) {
  if (table.header.size() != table.columns.size()) throw Error("csv header/column count mismatch");
  const std::size_t rows = table.rows();
  for (const auto& c : table.columns) {
    if (c.size() != rows) throw Error("csv columns have different lengths");
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  for (std::size_t j = 0; j < table.header.size(); ++j) out << (j ? "," : "") << table.header[j];
  out << '\n';
  char buf[64];
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
      const auto res = std::to_chars(buf, buf + sizeof buf, table.columns[j][i], std::chars_format::general, 17);
      if (j) out << ',';
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
  if (!out) throw Error("write to " + path.string() + " failed");
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw Error(path.string() + " is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  t.columns.resize(t.header.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    std::size_t col = 0;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p <= end && col < t.header.size()) {
      const char* comma = std::find(p, end, ',');
      double v = 0.0;
      const auto res = std::from_chars(p, comma, v);
      if (res.ec != std::errc{} || res.ptr != comma) {
        throw Error(path.string() + ": bad number in row " + std::to_string(row));
      }
      t.columns[col++].push_back(v);
      p = comma + 1;
    }
    if (col != t.header.size()) throw Error(path.string() + ": short row " + std::to_string(row));
  }
  return t;
}

}  // namespace anodec::io
