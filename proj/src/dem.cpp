#include "skewshed/dem.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <sstream>
#include <stdexcept>

namespace skewshed {

const char* units_label(Units units) {
  return units == Units::SquareMeters ? "m2" : "km2";
}

bool Dem::has_nodata_cells() const {
  if (!nodata.has_value()) return false;
  for (float v : values.data()) {
    if (v == *nodata) return true;
  }
  return false;
}

VsGrid convert_units(const VsGrid& grid, Units target) {
  if (grid.units == target) return grid;
  double factor = target == Units::SquareKilometers ? 1e-6 : 1e6;
  VsGrid out;
  out.units = target;
  out.values.reset(grid.values.rows(), grid.values.cols());
  for (std::size_t n = 0; n < grid.values.size(); ++n) {
    out.values.data()[n] = grid.values.data()[n] * factor;
  }
  return out;
}

std::vector<std::string> validate(const Dem& dem) {
  std::vector<std::string> errors;
  if (dem.dimy() < 2 || dem.dimx() < 2) {
    std::ostringstream os;
    os << "grid must be at least 2x2, got " << dem.dimy() << "x" << dem.dimx();
    errors.push_back(os.str());
  }
  if (!(dem.cellsize > 0.0) || !std::isfinite(dem.cellsize)) {
    std::ostringstream os;
    os << "cellsize must be a positive finite number, got " << dem.cellsize;
    errors.push_back(os.str());
  }
  for (int i = 0; i < dem.dimy(); ++i) {
    for (int j = 0; j < dem.dimx(); ++j) {
      float v = dem.values(i, j);
      if (dem.is_nodata(v)) continue;
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "non-finite elevation at cell (" << i << ", " << j << ")";
        errors.push_back(os.str());
      }
    }
  }
  return errors;
}

std::vector<std::string> validate(const RunConfig& cfg) {
  std::vector<std::string> errors;
  if (cfg.ns < 2 || cfg.ns % 2 != 0) {
    std::ostringstream os;
    os << "ns must be an even integer >= 2, got " << cfg.ns;
    errors.push_back(os.str());
  }
  if (!(cfg.h0 >= 0.0) || !std::isfinite(cfg.h0)) {
    std::ostringstream os;
    os << "observer height must be >= 0, got " << cfg.h0;
    errors.push_back(os.str());
  }
  if (cfg.workers < 1) {
    std::ostringstream os;
    os << "worker count must be >= 1, got " << cfg.workers;
    errors.push_back(os.str());
  }
  if (cfg.max_distance.has_value() &&
      (!(*cfg.max_distance > 0.0) || !std::isfinite(*cfg.max_distance))) {
    std::ostringstream os;
    os << "max distance must be a positive finite number, got "
       << *cfg.max_distance;
    errors.push_back(os.str());
  }
  return errors;
}

namespace {

// Uniform double in [0, 1) from the raw 32-bit stream; avoids
// std::uniform_real_distribution so the grids are identical across
// standard library implementations.
double next_unit(std::mt19937& rng) {
  return static_cast<double>(rng()) * (1.0 / 4294967296.0);
}

Grid<double> box_blur(const Grid<double>& g) {
  Grid<double> out(g.rows(), g.cols());
  for (int i = 0; i < g.rows(); ++i) {
    for (int j = 0; j < g.cols(); ++j) {
      double sum = 0.0;
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          int ii = std::clamp(i + di, 0, g.rows() - 1);
          int jj = std::clamp(j + dj, 0, g.cols() - 1);
          sum += g(ii, jj);
        }
      }
      out(i, j) = sum / 9.0;
    }
  }
  return out;
}

}  // namespace

Dem make_synthetic(SyntheticKind kind, int dimy, int dimx, double cellsize,
                   std::uint32_t seed) {
  if (dimy < 2 || dimx < 2) {
    throw std::invalid_argument("synthetic grid dimensions must be >= 2");
  }
  if (!(cellsize > 0.0)) {
    throw std::invalid_argument("synthetic cellsize must be positive");
  }
  Dem dem;
  dem.cellsize = cellsize;
  dem.values.reset(dimy, dimx, 0.0f);

  switch (kind) {
    case SyntheticKind::Flat:
      break;
    case SyntheticKind::Ramp:
      for (int i = 0; i < dimy; ++i) {
        for (int j = 0; j < dimx; ++j) {
          dem.values(i, j) = static_cast<float>(j);
        }
      }
      break;
    case SyntheticKind::Cone: {
      double cy = (dimy - 1) / 2.0;
      double cx = (dimx - 1) / 2.0;
      double peak = 0.5 * std::min(dimy, dimx);
      for (int i = 0; i < dimy; ++i) {
        for (int j = 0; j < dimx; ++j) {
          double d = std::hypot(i - cy, j - cx);
          dem.values(i, j) = static_cast<float>(std::max(0.0, peak - d));
        }
      }
      break;
    }
    case SyntheticKind::SmoothedNoise: {
      // Gentle rolling relief: a few meters of variation across 10 m
      // cells, like low hills at this resolution. Keeps sight lines
      // several cells long, the regime the engine is meant for.
      std::mt19937 rng(seed);
      Grid<double> noise(dimy, dimx);
      for (int i = 0; i < dimy; ++i) {
        for (int j = 0; j < dimx; ++j) {
          noise(i, j) = 3.0 * next_unit(rng);
        }
      }
      noise = box_blur(box_blur(noise));
      for (int i = 0; i < dimy; ++i) {
        for (int j = 0; j < dimx; ++j) {
          dem.values(i, j) = static_cast<float>(noise(i, j));
        }
      }
      break;
    }
  }
  return dem;
}

Dem fill_nodata_nearest(const Dem& dem) {
  Dem out = dem;
  if (!dem.nodata.has_value()) return out;

  int rows = dem.dimy();
  int cols = dem.dimx();
  std::deque<std::pair<int, int>> queue;
  Grid<std::uint8_t> filled(rows, cols, 0);

  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (!dem.is_nodata(dem.values(i, j))) {
        filled(i, j) = 1;
        queue.emplace_back(i, j);
      }
    }
  }
  if (queue.empty()) {
    throw std::runtime_error("cannot fill a grid that is entirely nodata");
  }

  constexpr int kDi[4] = {-1, 1, 0, 0};
  constexpr int kDj[4] = {0, 0, -1, 1};
  while (!queue.empty()) {
    auto [i, j] = queue.front();
    queue.pop_front();
    for (int n = 0; n < 4; ++n) {
      int ii = i + kDi[n];
      int jj = j + kDj[n];
      if (ii < 0 || ii >= rows || jj < 0 || jj >= cols) continue;
      if (filled(ii, jj)) continue;
      out.values(ii, jj) = out.values(i, j);
      filled(ii, jj) = 1;
      queue.emplace_back(ii, jj);
    }
  }
  out.nodata.reset();
  return out;
}

}  // namespace skewshed
