#include "oqb/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "oqb/errors.hpp"

namespace oqb {

namespace {

const char* k_palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                           "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

void write_svg_chart(const std::filesystem::path& path, const std::string& title,
                     const std::vector<double>& x,
                     const std::vector<std::vector<double>>& series,
                     const std::vector<std::string>& labels) {
  if (x.size() < 2 || series.empty()) throw io_error("svg chart needs data");
  const double w = 720, hgt = 420, ml = 70, mr = 20, mt = 40, mb = 50;

  double ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (double v : s)
      if (std::isfinite(v)) {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
      }
  if (!(ymax > ymin)) {
    ymax = ymin + 1.0;
    ymin -= 1.0;
  }
  const double xmin = x.front(), xmax = x.back();
  const auto px = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (w - ml - mr); };
  const auto py = [&](double v) {
    return hgt - mb - (v - ymin) / (ymax - ymin) * (hgt - mt - mb);
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << hgt
      << "\" viewBox=\"0 0 " << w << " " << hgt << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << title << "</text>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << hgt - mb << "\" x2=\"" << w - mr << "\" y2=\""
      << hgt - mb << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << hgt - mb << "\" stroke=\"black\"/>\n";
  // axis extremes
  out << "<text x=\"" << ml << "\" y=\"" << hgt - mb + 18
      << "\" font-size=\"11\" text-anchor=\"middle\">" << num(xmin) << "</text>\n"
      << "<text x=\"" << w - mr << "\" y=\"" << hgt - mb + 18
      << "\" font-size=\"11\" text-anchor=\"middle\">" << num(xmax) << "</text>\n"
      << "<text x=\"" << ml - 6 << "\" y=\"" << hgt - mb
      << "\" font-size=\"11\" text-anchor=\"end\">" << num(ymin) << "</text>\n"
      << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 4
      << "\" font-size=\"11\" text-anchor=\"end\">" << num(ymax) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = k_palette[s % 8];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    const std::size_t n = std::min(x.size(), series[s].size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(series[s][i])) continue;
      out << num(px(x[i])) << ',' << num(py(series[s][i])) << ' ';
    }
    out << "\"/>\n";
    if (s < labels.size())
      out << "<text x=\"" << w - mr - 150 << "\" y=\"" << mt + 16 + 14 * s
          << "\" font-size=\"11\" fill=\"" << color << "\">" << labels[s] << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw io_error("svg write failed");
}

}  // namespace oqb
