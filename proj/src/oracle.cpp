#include "skewshed/oracle.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace skewshed::oracle {

namespace {

void require_inside(const Dem& dem, int i, int j) {
  if (i < 0 || i >= dem.dimy() || j < 0 || j >= dem.dimx()) {
    std::ostringstream os;
    os << "observer (" << i << ", " << j << ") outside grid " << dem.dimy()
       << "x" << dem.dimx();
    throw std::out_of_range(os.str());
  }
}

// Walks the rasterized ray from (i0, j0) toward azimuth_deg and calls
// fn(i, j, dist) per cell until fn returns false or the ray leaves the
// grid. Azimuth 0 points along +j, 90 along +i.
template <typename Fn>
void walk_ray(const Dem& dem, int i0, int j0, double azimuth_deg, Fn&& fn) {
  double rad = azimuth_deg * std::numbers::pi / 180.0;
  double vj = std::cos(rad);
  double vi = std::sin(rad);
  int rows = dem.dimy();
  int cols = dem.dimx();

  if (std::abs(vj) >= std::abs(vi)) {
    int sj = vj >= 0.0 ? 1 : -1;
    double slope = vi / vj;  // |slope| <= 1
    for (int n = 1;; ++n) {
      int dj = n * sj;
      int j = j0 + dj;
      int i = i0 + static_cast<int>(std::lround(slope * dj));
      if (i < 0 || i >= rows || j < 0 || j >= cols) break;
      double dist = std::hypot(static_cast<double>(i - i0),
                               static_cast<double>(j - j0));
      if (!fn(i, j, dist)) break;
    }
  } else {
    int si = vi >= 0.0 ? 1 : -1;
    double slope = vj / vi;
    for (int n = 1;; ++n) {
      int di = n * si;
      int i = i0 + di;
      int j = j0 + static_cast<int>(std::lround(slope * di));
      if (i < 0 || i >= rows || j < 0 || j >= cols) break;
      double dist = std::hypot(static_cast<double>(i - i0),
                               static_cast<double>(j - j0));
      if (!fn(i, j, dist)) break;
    }
  }
}

}  // namespace

std::vector<GridPoint> select_axis_point_set(const Dem& dem, int i0, int j0,
                                             double azimuth_deg) {
  require_inside(dem, i0, j0);
  std::vector<GridPoint> points;
  walk_ray(dem, i0, j0, azimuth_deg, [&](int i, int j, double) {
    points.push_back({i, j});
    return true;
  });
  return points;
}

double linear_scan(const Dem& dem, int i0, int j0, double pov_h,
                   double azimuth_deg, double max_dist_cells,
                   RingSectorSet* rings_out) {
  require_inside(dem, i0, j0);

  double cv = 0.0;
  double max_theta = -std::numeric_limits<double>::infinity();
  double open_d = 0.0;
  double last_d = 0.0;
  bool visible = false;

  walk_ray(dem, i0, j0, azimuth_deg, [&](int i, int j, double dist) {
    if (dist > max_dist_cells) return false;
    double theta = (dem.values(i, j) - pov_h) / dist;
    bool above = theta > max_theta;
    if (above && !visible) {
      open_d = dist;
    } else if (!above && visible) {
      cv += dist * dist - open_d * open_d;
      if (rings_out) rings_out->push_back({open_d, dist});
    }
    visible = above;
    if (above) max_theta = theta;
    last_d = dist;
    return true;
  });

  if (visible) {
    double close_d = last_d + 1.0;
    cv += close_d * close_d - open_d * open_d;
    if (rings_out) rings_out->push_back({open_d, close_d});
  }
  return cv;
}

double singular_viewshed(const Dem& dem, int i0, int j0, double h0, int ns,
                         std::optional<double> max_distance) {
  require_inside(dem, i0, j0);
  if (ns < 2 || ns % 2 != 0) {
    throw std::invalid_argument("sector count must be an even integer >= 2");
  }

  double pov_h = dem.values(i0, j0) + h0;
  double max_cells = max_distance
                         ? *max_distance / dem.cellsize
                         : std::numeric_limits<double>::infinity();
  double cv = 0.0;
  for (int k = 0; k < ns / 2; ++k) {
    double s = k * (360.0 / ns);
    cv += linear_scan(dem, i0, j0, pov_h, s, max_cells);
    cv += linear_scan(dem, i0, j0, pov_h, s + 180.0, max_cells);
  }
  return cv * (std::numbers::pi / ns) * dem.cellsize * dem.cellsize;
}

MultiViewshed multi_viewshed(const Dem& dem, std::span<const GridPoint> povs,
                             double h0, int ns,
                             std::optional<double> max_distance) {
  MultiViewshed out;
  out.grid.units = Units::SquareMeters;
  out.grid.values.reset(dem.dimy(), dem.dimx(), 0.0);
  for (const GridPoint& p : povs) {
    double area = singular_viewshed(dem, p.i, p.j, h0, ns, max_distance);
    out.grid.values(p.i, p.j) += area;
    out.total_area += area;
  }
  return out;
}

VsGrid total_viewshed_reference(const Dem& dem, const RunConfig& cfg,
                                bool force) {
  auto dem_errors = validate(dem);
  if (!dem_errors.empty()) {
    throw std::invalid_argument("invalid grid: " + dem_errors.front());
  }
  auto cfg_errors = validate(cfg);
  if (!cfg_errors.empty()) {
    throw std::invalid_argument("invalid config: " + cfg_errors.front());
  }
  long long cells =
      static_cast<long long>(dem.dimy()) * static_cast<long long>(dem.dimx());
  if (cells > kReferenceCellGuard && !force) {
    std::ostringstream os;
    os << "reference total viewshed on " << dem.dimy() << "x" << dem.dimx()
       << " (" << cells << " cells) refused: the sweep costs on the order of "
       << "ns * N^(3/2) elevation tests and grids above "
       << kReferenceCellGuard << " cells take a long time; pass force to run "
       << "anyway";
    throw std::runtime_error(os.str());
  }

  VsGrid out;
  out.units = Units::SquareMeters;
  out.values.reset(dem.dimy(), dem.dimx(), 0.0);

  int workers = std::max(1, std::min(cfg.workers, dem.dimy()));
  std::atomic<int> next_row{0};
  auto work = [&]() {
    for (;;) {
      int i = next_row.fetch_add(1);
      if (i >= dem.dimy()) break;
      for (int j = 0; j < dem.dimx(); ++j) {
        out.values(i, j) =
            singular_viewshed(dem, i, j, cfg.h0, cfg.ns, cfg.max_distance);
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }

  if (cfg.units == Units::SquareKilometers) {
    out = convert_units(out, Units::SquareKilometers);
  }
  return out;
}

}  // namespace skewshed::oracle
