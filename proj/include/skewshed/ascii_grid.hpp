#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string_view>

#include "skewshed/dem.hpp"

namespace skewshed {

/// Parse failure with the offending line/column in the message. Reading a
/// grid either returns a Dem or throws this; it never crashes on bad
/// bytes.
class GridFormatError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// ESRI ASCII grid: header keys ncols, nrows, xllcorner, yllcorner,
/// cellsize and optionally NODATA_value, in that order and
/// case-insensitive, followed by nrows*ncols cell values, north row first.
Dem read_ascii_grid(const std::filesystem::path& path);
Dem read_ascii_grid(std::istream& in, std::string_view source_name);

void write_ascii_grid(const Dem& dem, const std::filesystem::path& path);

/// Writes a viewshed grid in the requested units, converting if needed.
/// cellsize and origin come from the source DEM.
void write_ascii_grid(const VsGrid& grid, Units out_units, double cellsize,
                      const GridOrigin& origin,
                      const std::filesystem::path& path);

}  // namespace skewshed
