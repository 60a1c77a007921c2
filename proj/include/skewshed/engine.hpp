#pragma once

#include <functional>
#include <span>

#include "skewshed/dem.hpp"
#include "skewshed/skew.hpp"

namespace skewshed {

/// One sector's unskewed contribution: per-cell ring-term sums already
/// corrected for shear distortion, before the (pi/ns)*cellsize^2 scaling.
struct SectorResult {
  int sector_index = 0;
  Grid<double> contribution;
  double wall_seconds = 0.0;
  double skew_seconds = 0.0;
  double scan_seconds = 0.0;
  double unskew_seconds = 0.0;
};

/// Phase totals across all sectors. The per-phase figures are sums of
/// per-sector durations (worker time); total_seconds is end-to-end wall
/// time of the run.
struct EngineStats {
  double skew_seconds = 0.0;
  double scan_seconds = 0.0;
  double unskew_seconds = 0.0;
  double reduce_seconds = 0.0;
  double total_seconds = 0.0;
  int sectors = 0;
};

/// Called once per sector, in ascending sector order, from the reducing
/// thread.
using ProgressFn = std::function<void(int sector_index, double wall_seconds)>;

/// Full pipeline over all ns/2 sectors: fold, shear, scan, unshear,
/// accumulate. Sectors are handed to workers dynamically, but partial
/// results are summed strictly in ascending sector order, so the output is
/// bitwise identical for any worker count. Pre-scaling accumulator.
Grid<double> total_viewshed_raw(const Dem& dem, const RunConfig& cfg,
                                EngineStats* stats = nullptr,
                                const ProgressFn& progress = {});

/// total_viewshed_raw scaled by (pi/ns)*cellsize^2 and converted to the
/// configured units. Rejects grids containing nodata cells.
VsGrid total_viewshed(const Dem& dem, const RunConfig& cfg,
                      EngineStats* stats = nullptr,
                      const ProgressFn& progress = {});

/// The per-sector pipeline on its own, for benchmarks and tests.
SectorResult sector_sweep(const Dem& dem, const RunConfig& cfg, int k);

/// accum += contribution, cell by cell.
void accumulate_into(Grid<double>& accum, const Grid<double>& contribution);

/// Sums the buffers in index order into a fresh accumulator. The fixed
/// order is the determinism contract: the engine adds sector contributions
/// through the same operation, ascending by sector index, no matter which
/// worker finished first.
Grid<double> reduce_ordered(std::span<const Grid<double>> buffers);

/// Combined output scaling: (pi/ns) * cellsize^2, in the requested units.
double area_scale_factor(const RunConfig& cfg, double cellsize);

}  // namespace skewshed
