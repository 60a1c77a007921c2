#pragma once

#include <string>

#include "skewshed/dem.hpp"
#include "skewshed/engine.hpp"

namespace skewshed {

/// One benchmark run. Phase seconds are sums of per-sector durations;
/// total_seconds is the end-to-end wall time. Throughput counts one
/// observer scan per cell per sector: dimy*dimx*(ns/2) scans divided by
/// the scan-phase seconds. speedup compares against a recorded
/// single-worker baseline; 0 when none was recorded.
struct BenchReport {
  std::string dataset;
  int dimy = 0;
  int dimx = 0;
  int ns = 0;
  int workers = 0;
  double skew_seconds = 0.0;
  double scan_seconds = 0.0;
  double unskew_seconds = 0.0;
  double reduce_seconds = 0.0;
  double total_seconds = 0.0;
  double povs_per_second = 0.0;
  double speedup = 0.0;
};

BenchReport make_bench_report(const std::string& dataset, int dimy, int dimx,
                              const RunConfig& cfg, const EngineStats& stats,
                              double baseline_total_seconds = 0.0);

/// Stable key:value lines, one block per report.
std::string format_bench_report(const BenchReport& report);

}  // namespace skewshed
