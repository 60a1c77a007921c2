#include "skewshed/scan.hpp"

#include <cassert>
#include <numbers>

namespace skewshed {

double linear_viewshed_row(std::span<const float> row, int first, int last,
                           int j0, double h, ScanDir dir, int max_dd,
                           std::vector<std::uint8_t>* visible_out) {
  assert(first <= j0 && j0 < last);

  double cv = 0.0;
  double max_theta = -std::numeric_limits<double>::infinity();
  double open_dd = 0.0;
  bool visible = false;
  int dd_last = 0;

  if (dir == ScanDir::Forward) {
    int stop = last;
    if (max_dd < last - j0 - 1) stop = j0 + max_dd + 1;
    for (int k = j0 + 1; k < stop; ++k) {
      int dd = k - j0;
      double theta = (row[k] - h) / dd;
      bool above = theta > max_theta;
      if (above && !visible) {
        open_dd = dd;
      } else if (!above && visible) {
        cv += static_cast<double>(dd) * dd - open_dd * open_dd;
      }
      visible = above;
      if (above) max_theta = theta;
      if (visible_out) visible_out->push_back(above ? 1 : 0);
      dd_last = dd;
    }
  } else {
    int stop = first - 1;
    if (max_dd < j0 - first) stop = j0 - max_dd - 1;
    for (int k = j0 - 1; k > stop; --k) {
      int dd = j0 - k;
      double theta = (row[k] - h) / dd;
      bool above = theta > max_theta;
      if (above && !visible) {
        open_dd = dd;
      } else if (!above && visible) {
        cv += static_cast<double>(dd) * dd - open_dd * open_dd;
      }
      visible = above;
      if (above) max_theta = theta;
      if (visible_out) visible_out->push_back(above ? 1 : 0);
      dd_last = dd;
    }
  }

  if (visible) {
    // Segment still open at the end of the range: the first cell past the
    // range plays the role of the closing target.
    double r = dd_last + 1.0;
    cv += r * r - open_dd * open_dd;
  }
  return cv;
}

void sector_viewshed(const SkwGrid& skw, double h0, int max_dd,
                     Grid<double>& out) {
  out.reset(skw.skw_rows(), skw.cols, 0.0);
  // 1/cos^2 == 1 + tan^2; the identity keeps the 45-degree factor at
  // exactly 2.
  double correction = 1.0 + skw.shear_tan * skw.shear_tan;

  for (int q = 0; q < skw.skw_rows(); ++q) {
    auto [first, last] = skw.row_ranges[q];
    if (last <= first) continue;
    std::span<const float> row(skw.values.row(q), skw.cols);
    for (int j0 = first; j0 < last; ++j0) {
      double h = row[j0] + h0;
      double cv =
          linear_viewshed_row(row, first, last, j0, h, ScanDir::Forward,
                              max_dd) +
          linear_viewshed_row(row, first, last, j0, h, ScanDir::Backward,
                              max_dd);
      out(q, j0) = cv * correction;
    }
  }
}

Grid<double> sector_viewshed(const SkwGrid& skw, double h0, int max_dd) {
  Grid<double> out;
  sector_viewshed(skw, h0, max_dd, out);
  return out;
}

double area_scale(double cv_sum, int ns, double cellsize) {
  return cv_sum * (std::numbers::pi / ns) * cellsize * cellsize;
}

}  // namespace skewshed
