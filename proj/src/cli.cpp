#include "skewshed/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "CLI11.hpp"
#include "skewshed/ascii_grid.hpp"
#include "skewshed/bench.hpp"
#include "skewshed/dem.hpp"
#include "skewshed/engine.hpp"
#include "skewshed/heatmap.hpp"
#include "skewshed/oracle.hpp"

namespace skewshed {

namespace {

int default_workers() {
  if (const char* env = std::getenv("SKEWSHED_WORKERS")) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), value);
    if (ec == std::errc{} && *ptr == '\0' && value >= 1) return value;
    std::cerr << "warning: ignoring invalid SKEWSHED_WORKERS value '" << env
              << "'\n";
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

Units parse_units(const std::string& s) {
  if (s == "m2") return Units::SquareMeters;
  if (s == "km2") return Units::SquareKilometers;
  throw std::runtime_error("unknown units '" + s + "' (expected m2 or km2)");
}

Palette parse_palette(const std::string& s) {
  if (s == "gray") return Palette::Gray;
  if (s == "blue-red") return Palette::BlueRed;
  throw std::runtime_error("unknown palette '" + s +
                           "' (expected gray or blue-red)");
}

std::vector<int> parse_int_list(const std::string& s, const char* what) {
  std::vector<int> values;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int value = 0;
    auto [ptr, ec] =
        std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc{} || ptr != item.data() + item.size() || value < 1) {
      throw std::runtime_error(std::string("invalid ") + what + " list '" + s +
                               "'");
    }
    values.push_back(value);
  }
  if (values.empty()) {
    throw std::runtime_error(std::string("empty ") + what + " list");
  }
  return values;
}

// Options shared by the compute subcommands.
struct CommonOpts {
  std::string input;
  std::string output;
  int ns = 360;
  double height = 1.5;
  int workers = default_workers();
  std::string units = "km2";
  double max_distance = 0.0;  // 0 means disabled
  std::string format = "asc";
  std::string palette = "blue-red";
};

void add_common(CLI::App* sub, CommonOpts& opt, bool with_output) {
  sub->add_option("--input", opt.input, "input ESRI ASCII grid")->required();
  if (with_output) {
    sub->add_option("--output", opt.output, "output path")->required();
  }
  sub->add_option("--ns", opt.ns, "azimuthal sector count (even)");
  sub->add_option("--height", opt.height, "observer height in meters");
  sub->add_option("--workers", opt.workers,
                  "worker threads (default: SKEWSHED_WORKERS or all cores)");
  sub->add_option("--units", opt.units, "output units")
      ->check(CLI::IsMember({"m2", "km2"}));
  sub->add_option("--max-distance", opt.max_distance,
                  "visibility cap in meters (0 disables)");
  sub->add_option("--format", opt.format, "output format")
      ->check(CLI::IsMember({"asc", "heatmap", "both"}));
  sub->add_option("--palette", opt.palette, "heatmap palette")
      ->check(CLI::IsMember({"gray", "blue-red"}));
}

RunConfig make_config(const CommonOpts& opt) {
  RunConfig cfg;
  cfg.ns = opt.ns;
  cfg.h0 = opt.height;
  cfg.workers = opt.workers;
  cfg.units = parse_units(opt.units);
  if (opt.max_distance > 0.0) cfg.max_distance = opt.max_distance;
  auto errors = validate(cfg);
  if (!errors.empty()) throw std::runtime_error(errors.front());
  return cfg;
}

Dem load_input(const std::string& path) { return read_ascii_grid(path); }

void write_outputs(const VsGrid& vs, const Dem& dem, const RunConfig& cfg,
                   const CommonOpts& opt) {
  bool want_asc = opt.format == "asc" || opt.format == "both";
  bool want_img = opt.format == "heatmap" || opt.format == "both";
  if (!want_asc && !want_img) {
    throw std::runtime_error("unknown format '" + opt.format +
                             "' (expected asc, heatmap or both)");
  }
  Palette palette = parse_palette(opt.palette);
  if (want_asc) {
    write_ascii_grid(vs, cfg.units, dem.cellsize, dem.origin, opt.output);
  }
  if (want_img) {
    std::filesystem::path img(opt.output);
    std::string ext = palette == Palette::Gray ? ".pgm" : ".ppm";
    if (want_asc || (img.extension() != ".pgm" && img.extension() != ".ppm")) {
      img.replace_extension(ext);
    }
    write_heatmap(vs, img, palette);
  }
}

ProgressFn make_progress(int half) {
  if (!isatty(STDERR_FILENO)) return {};
  return [half](int k, double) {
    std::fprintf(stderr, "\rsector %d/%d", k + 1, half);
    if (k + 1 == half) std::fprintf(stderr, "\n");
  };
}

int cmd_total(const CommonOpts& opt) {
  Dem dem = load_input(opt.input);
  if (dem.has_nodata_cells()) {
    throw std::runtime_error(
        "input contains nodata cells; run 'skewshed fill' first");
  }
  RunConfig cfg = make_config(opt);
  EngineStats stats;
  VsGrid vs = total_viewshed(dem, cfg, &stats, make_progress(cfg.ns / 2));
  write_outputs(vs, dem, cfg, opt);
  std::cout << format_bench_report(
      make_bench_report(opt.input, dem.dimy(), dem.dimx(), cfg, stats));
  return 0;
}

int cmd_reference(const CommonOpts& opt, bool force) {
  Dem dem = load_input(opt.input);
  if (dem.has_nodata_cells()) {
    throw std::runtime_error(
        "input contains nodata cells; run 'skewshed fill' first");
  }
  RunConfig cfg = make_config(opt);
  VsGrid vs = oracle::total_viewshed_reference(dem, cfg, force);
  write_outputs(vs, dem, cfg, opt);
  return 0;
}

int cmd_single(const CommonOpts& opt, const std::string& pov) {
  Dem dem = load_input(opt.input);
  RunConfig cfg = make_config(opt);
  int i = 0, j = 0;
  if (std::sscanf(pov.c_str(), "%d,%d", &i, &j) != 2) {
    throw std::runtime_error("expected --pov row,col, got '" + pov + "'");
  }
  double area = oracle::singular_viewshed(dem, i, j, cfg.h0, cfg.ns,
                                          cfg.max_distance);
  if (cfg.units == Units::SquareKilometers) area *= 1e-6;
  std::printf("pov: %d %d\n", i, j);
  std::printf("area_%s: %.10g\n", units_label(cfg.units), area);
  return 0;
}

std::vector<oracle::GridPoint> read_pov_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open POV list '" + path + "'");
  }
  std::vector<oracle::GridPoint> povs;
  oracle::GridPoint p;
  while (in >> p.i >> p.j) povs.push_back(p);
  if (!in.eof()) {
    throw std::runtime_error("malformed POV list '" + path +
                             "': expected pairs of integers");
  }
  return povs;
}

std::vector<oracle::GridPoint> random_povs(const Dem& dem, int count,
                                           std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::vector<oracle::GridPoint> povs;
  povs.reserve(count);
  for (int n = 0; n < count; ++n) {
    // Scale the raw 32-bit draws so the grids do not depend on library
    // distribution internals.
    auto i = static_cast<int>((static_cast<std::uint64_t>(rng()) *
                               static_cast<std::uint64_t>(dem.dimy())) >> 32);
    auto j = static_cast<int>((static_cast<std::uint64_t>(rng()) *
                               static_cast<std::uint64_t>(dem.dimx())) >> 32);
    povs.push_back({i, j});
  }
  return povs;
}

int cmd_multi(const CommonOpts& opt, const std::string& pov_file, int count,
              std::uint32_t seed) {
  Dem dem = load_input(opt.input);
  RunConfig cfg = make_config(opt);
  std::vector<oracle::GridPoint> povs;
  if (!pov_file.empty()) {
    povs = read_pov_file(pov_file);
  } else if (count > 0) {
    povs = random_povs(dem, count, seed);
  } else {
    throw std::runtime_error("multi needs --povs FILE or --count N");
  }
  oracle::MultiViewshed mv =
      oracle::multi_viewshed(dem, povs, cfg.h0, cfg.ns, cfg.max_distance);
  double scale = cfg.units == Units::SquareKilometers ? 1e-6 : 1.0;
  for (const auto& p : povs) {
    std::printf("pov_area: %d %d %.10g\n", p.i, p.j,
                mv.grid.values(p.i, p.j) * scale);
  }
  std::printf("area_total_%s: %.10g\n", units_label(cfg.units),
              mv.total_area * scale);
  if (!opt.output.empty()) {
    write_outputs(mv.grid, dem, cfg, opt);
  }
  return 0;
}

int cmd_bench(const CommonOpts& opt, const std::string& workers_list,
              const std::string& ns_list) {
  Dem dem = load_input(opt.input);
  if (dem.has_nodata_cells()) {
    throw std::runtime_error(
        "input contains nodata cells; run 'skewshed fill' first");
  }
  std::vector<int> workers = parse_int_list(workers_list, "workers");
  std::vector<int> sector_counts = parse_int_list(ns_list, "ns");

  bool first = true;
  for (int ns : sector_counts) {
    double baseline = 0.0;
    for (int w : workers) {
      CommonOpts run_opt = opt;
      run_opt.ns = ns;
      run_opt.workers = w;
      RunConfig cfg = make_config(run_opt);
      EngineStats stats;
      total_viewshed(dem, cfg, &stats);
      if (w == 1 && baseline == 0.0) baseline = stats.total_seconds;
      BenchReport report = make_bench_report(opt.input, dem.dimy(), dem.dimx(),
                                             cfg, stats, baseline);
      if (!first) std::cout << "\n";
      std::cout << format_bench_report(report);
      first = false;
    }
  }
  return 0;
}

int cmd_fill(const CommonOpts& opt) {
  Dem dem = load_input(opt.input);
  Dem filled = fill_nodata_nearest(dem);
  write_ascii_grid(filled, opt.output);
  return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args) {
  CLI::App app{"total-viewshed engine on skewed elevation grids"};
  app.require_subcommand(1);

  CommonOpts total_opt, ref_opt, single_opt, multi_opt, bench_opt, fill_opt;
  bool force = false;
  std::string pov;
  std::string pov_file;
  int count = 0;
  std::uint32_t seed = 0;
  std::string workers_list = "1";
  std::string ns_list = "360";

  CLI::App* sub_total =
      app.add_subcommand("total", "total viewshed via the skewed-grid engine");
  add_common(sub_total, total_opt, /*with_output=*/true);

  CLI::App* sub_ref = app.add_subcommand(
      "reference", "total viewshed via the rotational-sweep reference (slow)");
  add_common(sub_ref, ref_opt, /*with_output=*/true);
  sub_ref->add_flag("--force", force, "run even on large grids");

  CLI::App* sub_single =
      app.add_subcommand("single", "viewshed area of one observer");
  add_common(sub_single, single_opt, /*with_output=*/false);
  sub_single->add_option("--pov", pov, "observer cell as row,col")->required();

  CLI::App* sub_multi =
      app.add_subcommand("multi", "accumulated viewshed of several observers");
  add_common(sub_multi, multi_opt, /*with_output=*/false);
  sub_multi->add_option("--output", multi_opt.output,
                        "optional output grid path");
  sub_multi->add_option("--povs", pov_file, "file of observer cells (row col)");
  sub_multi->add_option("--count", count, "number of random observers");
  sub_multi->add_option("--seed", seed, "seed for random observers");

  CLI::App* sub_bench = app.add_subcommand(
      "bench", "run the engine over worker/sector sweeps and report");
  sub_bench->add_option("--input", bench_opt.input, "input ESRI ASCII grid")
      ->required();
  sub_bench->add_option("--workers", workers_list,
                        "comma-separated worker counts, e.g. 1,2,4");
  sub_bench->add_option("--ns", ns_list, "comma-separated sector counts");
  sub_bench->add_option("--height", bench_opt.height,
                        "observer height in meters");
  sub_bench->add_option("--units", bench_opt.units, "output units")
      ->check(CLI::IsMember({"m2", "km2"}));

  CLI::App* sub_fill = app.add_subcommand(
      "fill", "replace nodata cells with their nearest populated neighbor");
  sub_fill->add_option("--input", fill_opt.input, "input ESRI ASCII grid")
      ->required();
  sub_fill->add_option("--output", fill_opt.output, "output path")->required();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(sub_total)) return cmd_total(total_opt);
    if (app.got_subcommand(sub_ref)) return cmd_reference(ref_opt, force);
    if (app.got_subcommand(sub_single)) return cmd_single(single_opt, pov);
    if (app.got_subcommand(sub_multi)) {
      return cmd_multi(multi_opt, pov_file, count, seed);
    }
    if (app.got_subcommand(sub_bench)) {
      return cmd_bench(bench_opt, workers_list, ns_list);
    }
    if (app.got_subcommand(sub_fill)) return cmd_fill(fill_opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace skewshed
