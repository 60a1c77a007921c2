#pragma once

#include <filesystem>

#include "skewshed/dem.hpp"

namespace skewshed {

enum class Palette { Gray, BlueRed };

/// 8-bit min-max normalized raster image of a viewshed grid: binary PGM
/// for Gray, binary PPM for BlueRed (low values blue, high values red).
/// A constant grid renders as the low end of the palette. Output bytes are
/// a pure function of the grid.
void write_heatmap(const VsGrid& grid, const std::filesystem::path& path,
                   Palette palette);

}  // namespace skewshed
