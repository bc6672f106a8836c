#include "oqb/csv.hpp"

#include <cstdio>
#include <sstream>

namespace oqb {

csv_writer::csv_writer(const std::filesystem::path& path,
                       const std::vector<std::string>& header)
    : out_(path, std::ios::binary), columns_(header.size()) {
  if (!out_) throw io_error("cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

void csv_writer::row(std::span<const double> values) {
  if (values.size() != columns_) throw io_error("csv row width mismatch");
  std::string line;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    line += format(values[i]);
  }
  line += '\n';
  out_ << line;
  if (!out_) throw io_error("csv write failed");
}

std::string csv_writer::format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

csv_table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path.string());
  csv_table table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    if (first) {
      while (std::getline(ss, cell, ',')) table.header.push_back(cell);
      first = false;
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.size() != table.header.size())
      throw io_error("ragged csv row in " + path.string());
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace oqb
