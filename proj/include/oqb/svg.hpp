#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace oqb {

// Minimal line chart: one polyline per series over a shared x axis.
// The output is a pure function of the data, so fixed inputs give
// byte-identical files.
void write_svg_chart(const std::filesystem::path& path, const std::string& title,
                     const std::vector<double>& x,
                     const std::vector<std::vector<double>>& series,
                     const std::vector<std::string>& labels);

}  // namespace oqb
