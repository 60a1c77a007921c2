#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "skewshed/grid.hpp"
#include "skewshed/skew.hpp"

namespace skewshed {

enum class ScanDir { Forward, Backward };

inline constexpr int kNoDistanceCap = std::numeric_limits<int>::max();

/// One-directional visible-segment scan along a row. Targets are the cells
/// k = j0+1, j0+2, ... (or descending) while k stays inside [first, last)
/// and within max_dd cells of the observer. A target is visible when its
/// elevation angle strictly exceeds the running maximum. Each visible
/// segment contributes close^2 - open^2 in squared cell units; a segment
/// still open when the scan runs out of range closes one cell past the
/// last target. Returns the accumulated sum (>= 0).
///
/// h is the observer's absolute height (ground elevation plus eye height).
/// When visible_out is given, one flag per scanned target is appended.
double linear_viewshed_row(std::span<const float> row, int first, int last,
                           int j0, double h, ScanDir dir,
                           int max_dd = kNoDistanceCap,
                           std::vector<std::uint8_t>* visible_out = nullptr);

/// Runs the row scan in both directions from every fully covered cell of
/// the sheared grid and corrects for the shear distortion: a step of one
/// column advances 1/cos(shear) cells along the true line, so the squared
/// ring terms pick up the factor 1 + tan^2 once per observer. Cells that
/// are not fully covered get 0 and are never scanned as observer or
/// target.
void sector_viewshed(const SkwGrid& skw, double h0, int max_dd,
                     Grid<double>& out);
Grid<double> sector_viewshed(const SkwGrid& skw, double h0,
                             int max_dd = kNoDistanceCap);

/// Converts a sum of squared-cell ring terms into an area in m^2:
/// cv_sum * (pi/ns) * cellsize^2.
double area_scale(double cv_sum, int ns, double cellsize);

}  // namespace skewshed
