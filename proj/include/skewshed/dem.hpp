#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "skewshed/grid.hpp"

namespace skewshed {

/// Georeference metadata carried through file I/O without interpretation.
struct GridOrigin {
  double easting = 0.0;
  double northing = 0.0;
  std::string zone;
};

enum class Units { SquareMeters, SquareKilometers };

const char* units_label(Units units);  // "m2" or "km2"

/// Elevation raster in meters with a uniform square cell size.
/// Immutable by convention once handed to the engine: workers share it
/// without synchronization.
struct Dem {
  Grid<float> values;
  double cellsize = 1.0;  // meters per cell, identical in x and y
  std::optional<float> nodata;
  GridOrigin origin;

  int dimy() const { return values.rows(); }
  int dimx() const { return values.cols(); }

  bool is_nodata(float v) const { return nodata.has_value() && v == *nodata; }
  bool has_nodata_cells() const;
};

/// Parameters shared by the engine and the reference implementation.
struct RunConfig {
  int ns = 360;       // azimuthal sector count over 2*pi; must be even
  double h0 = 1.5;    // observer height above the ground, meters
  int workers = 1;    // worker threads for sector-level parallelism
  std::optional<double> max_distance;  // visibility cap in meters; off by default
  Units units = Units::SquareKilometers;
};

/// Viewshed areas, one value per DEM cell.
struct VsGrid {
  Grid<double> values;
  Units units = Units::SquareMeters;
};

VsGrid convert_units(const VsGrid& grid, Units target);

/// All invariant violations, empty when the grid is usable.
std::vector<std::string> validate(const Dem& dem);
std::vector<std::string> validate(const RunConfig& cfg);

enum class SyntheticKind { Flat, Ramp, Cone, SmoothedNoise };

/// Deterministic test terrain. Flat is all zeros; Ramp rises 1 m per cell
/// eastward; Cone peaks at the grid center; SmoothedNoise is seeded value
/// noise passed through two box-blur rounds. Same arguments always produce
/// bitwise-identical grids.
Dem make_synthetic(SyntheticKind kind, int dimy, int dimx, double cellsize,
                   std::uint32_t seed = 0);

/// Replaces every nodata cell with the value of the nearest populated cell
/// (breadth-first over edge neighbors; deterministic tie-breaking).
Dem fill_nodata_nearest(const Dem& dem);

}  // namespace skewshed
