#include "skewshed/bench.hpp"

#include <cstdio>
#include <sstream>

namespace skewshed {

BenchReport make_bench_report(const std::string& dataset, int dimy, int dimx,
                              const RunConfig& cfg, const EngineStats& stats,
                              double baseline_total_seconds) {
  BenchReport r;
  r.dataset = dataset;
  r.dimy = dimy;
  r.dimx = dimx;
  r.ns = cfg.ns;
  r.workers = cfg.workers;
  r.skew_seconds = stats.skew_seconds;
  r.scan_seconds = stats.scan_seconds;
  r.unskew_seconds = stats.unskew_seconds;
  r.reduce_seconds = stats.reduce_seconds;
  r.total_seconds = stats.total_seconds;
  r.povs_per_second = static_cast<double>(r.dimy) * static_cast<double>(r.dimx) *
                      static_cast<double>(r.ns / 2) / r.scan_seconds;
  if (baseline_total_seconds > 0.0) {
    r.speedup = baseline_total_seconds / r.total_seconds;
  }
  return r;
}

std::string format_bench_report(const BenchReport& report) {
  char buf[64];
  std::ostringstream os;
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  };
  os << "dataset: " << report.dataset << "\n";
  os << "dimy: " << report.dimy << "\n";
  os << "dimx: " << report.dimx << "\n";
  os << "ns: " << report.ns << "\n";
  os << "workers: " << report.workers << "\n";
  os << "skew_seconds: " << num(report.skew_seconds) << "\n";
  os << "scan_seconds: " << num(report.scan_seconds) << "\n";
  os << "unskew_seconds: " << num(report.unskew_seconds) << "\n";
  os << "reduce_seconds: " << num(report.reduce_seconds) << "\n";
  os << "total_seconds: " << num(report.total_seconds) << "\n";
  os << "povs_per_second: " << num(report.povs_per_second) << "\n";
  if (report.speedup > 0.0) {
    os << "speedup: " << num(report.speedup) << "\n";
  }
  return os.str();
}

}  // namespace skewshed
