#include "skewshed/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace skewshed {

void write_heatmap(const VsGrid& grid, const std::filesystem::path& path,
                   Palette palette) {
  const Grid<double>& v = grid.values;
  if (v.empty()) {
    throw std::invalid_argument("cannot render an empty grid");
  }
  double lo = v.data().front();
  double hi = lo;
  for (double x : v.data()) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("cannot render a grid with non-finite values");
    }
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  double range = hi - lo;

  std::string bytes;
  bytes += palette == Palette::Gray ? "P5\n" : "P6\n";
  bytes += std::to_string(v.cols()) + " " + std::to_string(v.rows()) + "\n255\n";

  for (int i = 0; i < v.rows(); ++i) {
    const double* row = v.row(i);
    for (int j = 0; j < v.cols(); ++j) {
      double t = range > 0.0 ? (row[j] - lo) / range : 0.0;
      auto level = static_cast<unsigned char>(std::lround(t * 255.0));
      if (palette == Palette::Gray) {
        bytes += static_cast<char>(level);
      } else {
        bytes += static_cast<char>(level);        // red
        bytes += static_cast<char>(0);            // green
        bytes += static_cast<char>(255 - level);  // blue
      }
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() +
                             "' for writing");
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw std::runtime_error("failed while writing '" + path.string() + "'");
  }
}

}  // namespace skewshed
