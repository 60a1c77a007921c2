#include "skewshed/engine.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

#include "skewshed/scan.hpp"

namespace skewshed {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Scan range cap in skewed-row cells for a physical distance cap: one
// column step covers cellsize*sqrt(1+tan^2) meters along the line.
int distance_cap_cells(const RunConfig& cfg, double shear_tan,
                       double cellsize) {
  if (!cfg.max_distance.has_value()) return kNoDistanceCap;
  double step = cellsize * std::sqrt(1.0 + shear_tan * shear_tan);
  double cap = std::floor(*cfg.max_distance / step);
  if (cap >= static_cast<double>(kNoDistanceCap)) return kNoDistanceCap;
  return std::max(0, static_cast<int>(cap));
}

// Per-worker scratch, reused across every sector the worker processes.
struct Workspace {
  Grid<float> pre;
  SkwGrid skw;
  Grid<double> skw_vs;
};

void compute_sector(const Dem& dem, const RunConfig& cfg, int k,
                    Workspace& ws, SectorResult& out) {
  SectorPlan plan = plan_sector(k, cfg.ns, dem.dimy(), dem.dimx());

  auto t0 = Clock::now();
  apply_pre_ops(dem.values, plan.pre_ops, ws.pre);
  build_skw(ws.pre, plan.shear_tan, ws.skw);
  out.skew_seconds = seconds_since(t0);

  auto t1 = Clock::now();
  int max_dd = distance_cap_cells(cfg, plan.shear_tan, dem.cellsize);
  sector_viewshed(ws.skw, cfg.h0, max_dd, ws.skw_vs);
  out.scan_seconds = seconds_since(t1);

  auto t2 = Clock::now();
  out.contribution.reset(dem.dimy(), dem.dimx(), 0.0);
  unskew_accumulate(ws.skw_vs, plan, out.contribution);
  out.unskew_seconds = seconds_since(t2);

  out.sector_index = k;
  out.wall_seconds = seconds_since(t0);
}

void require_valid(const Dem& dem, const RunConfig& cfg) {
  auto dem_errors = validate(dem);
  if (!dem_errors.empty()) {
    throw std::invalid_argument("invalid grid: " + dem_errors.front());
  }
  if (dem.has_nodata_cells()) {
    throw std::invalid_argument(
        "grid contains nodata cells; fill them before running the engine");
  }
  auto cfg_errors = validate(cfg);
  if (!cfg_errors.empty()) {
    throw std::invalid_argument("invalid config: " + cfg_errors.front());
  }
}

}  // namespace

void accumulate_into(Grid<double>& accum, const Grid<double>& contribution) {
  if (!accum.same_shape(contribution)) {
    throw std::invalid_argument("cannot accumulate grids of different shape");
  }
  double* a = accum.data().data();
  const double* c = contribution.data().data();
  for (std::size_t n = 0; n < accum.size(); ++n) a[n] += c[n];
}

Grid<double> reduce_ordered(std::span<const Grid<double>> buffers) {
  if (buffers.empty()) {
    throw std::invalid_argument("nothing to reduce");
  }
  Grid<double> accum(buffers.front().rows(), buffers.front().cols(), 0.0);
  for (const Grid<double>& b : buffers) accumulate_into(accum, b);
  return accum;
}

double area_scale_factor(const RunConfig& cfg, double cellsize) {
  double factor = (std::numbers::pi / cfg.ns) * cellsize * cellsize;
  if (cfg.units == Units::SquareKilometers) factor *= 1e-6;
  return factor;
}

Grid<double> total_viewshed_raw(const Dem& dem, const RunConfig& cfg,
                                EngineStats* stats,
                                const ProgressFn& progress) {
  require_valid(dem, cfg);
  auto run_start = Clock::now();

  int half = cfg.ns / 2;
  int workers = std::min(cfg.workers, half);

  // Free contribution buffers. Workers take one before claiming a sector,
  // so the earliest unfinished sector always owns a buffer and the
  // reducing thread can never starve behind out-of-order completions.
  std::mutex pool_mutex;
  std::condition_variable pool_cv;
  std::vector<Grid<double>> pool;
  int pool_size = std::min(half, 2 * workers + 2);
  for (int n = 0; n < pool_size; ++n) {
    pool.emplace_back(dem.dimy(), dem.dimx(), 0.0);
  }

  std::mutex done_mutex;
  std::condition_variable done_cv;
  std::map<int, SectorResult> done;
  std::exception_ptr failure;
  bool stop = false;

  std::atomic<int> next_sector{0};

  auto worker = [&]() {
    Workspace ws;
    try {
      for (;;) {
        Grid<double> buffer;
        {
          std::unique_lock<std::mutex> lock(pool_mutex);
          pool_cv.wait(lock, [&] { return stop || !pool.empty(); });
          if (stop) break;
          buffer = std::move(pool.back());
          pool.pop_back();
        }
        int k = next_sector.fetch_add(1);
        if (k >= half) {
          std::lock_guard<std::mutex> lock(pool_mutex);
          pool.push_back(std::move(buffer));
          pool_cv.notify_one();
          break;
        }
        SectorResult result;
        result.contribution = std::move(buffer);
        compute_sector(dem, cfg, k, ws, result);
        {
          std::lock_guard<std::mutex> lock(done_mutex);
          done.emplace(k, std::move(result));
        }
        done_cv.notify_one();
      }
    } catch (...) {
      {
        std::lock_guard<std::mutex> lock(done_mutex);
        if (!failure) failure = std::current_exception();
      }
      done_cv.notify_one();
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (int w = 0; w < workers; ++w) threads.emplace_back(worker);

  Grid<double> accum(dem.dimy(), dem.dimx(), 0.0);
  EngineStats local;
  local.sectors = half;

  for (int expect = 0; expect < half; ++expect) {
    SectorResult result;
    {
      std::unique_lock<std::mutex> lock(done_mutex);
      done_cv.wait(lock,
                   [&] { return failure || done.count(expect) > 0; });
      if (failure) break;
      auto it = done.find(expect);
      result = std::move(it->second);
      done.erase(it);
    }
    auto t0 = Clock::now();
    accumulate_into(accum, result.contribution);
    local.reduce_seconds += seconds_since(t0);
    local.skew_seconds += result.skew_seconds;
    local.scan_seconds += result.scan_seconds;
    local.unskew_seconds += result.unskew_seconds;
    {
      std::lock_guard<std::mutex> lock(pool_mutex);
      pool.push_back(std::move(result.contribution));
    }
    pool_cv.notify_one();
    if (progress) progress(expect, result.wall_seconds);
  }

  {
    // Normal termination drains on its own; this only matters when a
    // worker failed and buffers will no longer be returned.
    std::lock_guard<std::mutex> lock(pool_mutex);
    stop = true;
  }
  pool_cv.notify_all();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);

  local.total_seconds = seconds_since(run_start);
  if (stats) *stats = local;
  return accum;
}

VsGrid total_viewshed(const Dem& dem, const RunConfig& cfg,
                      EngineStats* stats, const ProgressFn& progress) {
  Grid<double> raw = total_viewshed_raw(dem, cfg, stats, progress);
  double factor = area_scale_factor(cfg, dem.cellsize);
  VsGrid out;
  out.units = cfg.units;
  out.values.reset(raw.rows(), raw.cols());
  const double* src = raw.data().data();
  double* dst = out.values.data().data();
  for (std::size_t n = 0; n < raw.size(); ++n) dst[n] = src[n] * factor;
  return out;
}

SectorResult sector_sweep(const Dem& dem, const RunConfig& cfg, int k) {
  require_valid(dem, cfg);
  if (k < 0 || k >= cfg.ns / 2) {
    throw std::out_of_range("sector index out of range");
  }
  Workspace ws;
  SectorResult result;
  compute_sector(dem, cfg, k, ws, result);
  return result;
}

}  // namespace skewshed
