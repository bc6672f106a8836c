#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "oqb/errors.hpp"

namespace oqb {

// UTF-8 CSV with a header row, Unix newlines and full-precision doubles
// (17 significant digits), so repeated runs are byte-comparable.
class csv_writer {
 public:
  csv_writer(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(std::span<const double> values);

  static std::string format(double v);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

struct csv_table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

csv_table read_csv(const std::filesystem::path& path);

}  // namespace oqb
