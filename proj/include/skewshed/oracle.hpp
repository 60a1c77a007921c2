#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "skewshed/dem.hpp"

namespace skewshed::oracle {

// Classic rotational sweep in unskewed grid space. Deliberately
// independent of the skew pipeline so the two can be compared: rays are
// rasterized per direction, distances are Euclidean in cell units, and no
// data relocation happens. Slow and simple on purpose.

struct GridPoint {
  int i = 0;
  int j = 0;
};

/// Visible interval along one scan: opened at distance r_open, closed at
/// r_close, both in cell units, 0 < r_open < r_close.
struct RingSector {
  double r_open = 0.0;
  double r_close = 0.0;
};

using RingSectorSet = std::vector<RingSector>;

/// Cells crossed by the ray from (i0, j0) toward azimuth_deg, nearest
/// first, one cell per unit step of the dominant axis with the minor
/// coordinate rounded to nearest. The observer cell itself is excluded.
std::vector<GridPoint> select_axis_point_set(const Dem& dem, int i0, int j0,
                                             double azimuth_deg);

/// One-directional scan along the azimuth ray. pov_h is the observer's
/// absolute height. Returns the sum of r_close^2 - r_open^2 over the
/// visible ring sectors; appends them to rings_out when provided.
double linear_scan(const Dem& dem, int i0, int j0, double pov_h,
                   double azimuth_deg,
                   double max_dist_cells =
                       std::numeric_limits<double>::infinity(),
                   RingSectorSet* rings_out = nullptr);

/// Viewshed area in m^2 for one observer: ring-sector sums over ns
/// directions (ns/2 sector axes, each scanned both ways), scaled by
/// (pi/ns) * cellsize^2.
double singular_viewshed(const Dem& dem, int i0, int j0, double h0, int ns,
                         std::optional<double> max_distance = {});

struct MultiViewshed {
  VsGrid grid;  // nonzero only at the observer cells, m^2
  double total_area = 0.0;
};

MultiViewshed multi_viewshed(const Dem& dem, std::span<const GridPoint> povs,
                             double h0, int ns,
                             std::optional<double> max_distance = {});

/// Cost guard for the whole-grid reference run; lift with force.
inline constexpr int kReferenceCellGuard = 65536;

/// Singular viewshed at every cell. O(ns * N^(3/2)) work, so grids above
/// kReferenceCellGuard cells are refused unless force is set. Parallel
/// over cells; output does not depend on the worker count.
VsGrid total_viewshed_reference(const Dem& dem, const RunConfig& cfg,
                                bool force = false);

}  // namespace skewshed::oracle
