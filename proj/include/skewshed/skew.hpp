#pragma once

#include <span>
#include <utility>
#include <vector>

#include "skewshed/grid.hpp"

namespace skewshed {

/// Axis-aligned grid transforms used to fold any sector into the shear
/// domain where the line slope satisfies 0 <= tan <= 1. Each op is its own
/// inverse.
enum class AxisOp { Transpose, FlipCols, FlipRows };

/// Affine index map back to the source grid:
///   src_i = ii*i + ij*j + ci,  src_j = ji*i + jj*j + cj.
struct IndexMap {
  int ii = 1, ij = 0, ci = 0;
  int ji = 0, jj = 1, cj = 0;

  std::pair<int, int> operator()(int i, int j) const {
    return {ii * i + ij * j + ci, ji * i + jj * j + cj};
  }
};

/// How one sector is realized: the axis transforms applied to the DEM
/// before shearing, and the reduced shear angle.
struct SectorPlan {
  int sector_index = 0;
  int ns = 0;
  double sector_deg = 0.0;  // sector axis azimuth in [0, 180)
  double shear_deg = 0.0;   // reduced angle in [0, 45]
  double shear_tan = 0.0;   // tan(shear_deg); exactly 0 and 1 at the corners
  std::vector<AxisOp> pre_ops;
  int rows = 0;  // grid shape after pre_ops
  int cols = 0;
  int src_rows = 0;  // original DEM shape
  int src_cols = 0;
  IndexMap to_source;  // pre_ops-space index -> DEM-space index
};

/// Sector k of ns maps to azimuth k*(360/ns) degrees; the scan covers that
/// direction and its opposite, so k ranges over [0, ns/2).
SectorPlan plan_sector(int k, int ns, int dimy, int dimx);

struct ShearParams {
  int dest;     // floor(tan * j): whole-row displacement of column j
  double frac;  // remainder in [0, 1), split between two destination rows
};

ShearParams shear_params(double shear_tan, int j);

/// Sheared elevation grid for one sector. Source cell (i, j) distributes
/// its value between rows base+i-dest and base+i-dest-1 of column j with
/// weights (1-frac) and frac. A cell whose accumulated weight reaches 1 is
/// fully covered by source data; only those cells take part in scans.
struct SkwGrid {
  int src_rows = 0;
  int cols = 0;
  int base = 0;  // destination row offset; equals src_rows for square grids
  double shear_tan = 0.0;
  Grid<float> values;
  Grid<float> weights;
  std::vector<std::pair<int, int>> row_ranges;  // per row, [first, last) full cells

  int skw_rows() const { return base + src_rows; }
};

inline constexpr float kFullWeightTol = 1e-6f;

inline bool full_weight(float w) {
  return w > 1.0f - kFullWeightTol && w < 1.0f + kFullWeightTol;
}

/// Applies the plan's axis transforms to a grid.
void apply_pre_ops(const Grid<float>& g, std::span<const AxisOp> ops,
                   Grid<float>& out);
Grid<float> apply_pre_ops(const Grid<float>& g, std::span<const AxisOp> ops);

/// Shears a grid (already in pre_ops space) by shear_tan in [0, 1].
void build_skw(const Grid<float>& g, double shear_tan, SkwGrid& out);
SkwGrid build_skw(const Grid<float>& g, double shear_tan);

/// Pulls a skew-space value grid back into DEM space and adds it into out.
/// Every source cell reads its two destination rows with the same weights
/// the shear used. out must be shaped like the original DEM.
void unskew_accumulate(const Grid<double>& skw_vs, const SectorPlan& plan,
                       Grid<double>& out);

}  // namespace skewshed
