#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "skewshed/ascii_grid.hpp"
#include "skewshed/bench.hpp"
#include "skewshed/cli.hpp"
#include "skewshed/dem.hpp"
#include "skewshed/engine.hpp"
#include "skewshed/heatmap.hpp"

using namespace skewshed;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("skewshed_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter.fetch_add(1)));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

Dem parse(const std::string& text) {
  std::istringstream in(text);
  return read_ascii_grid(in, "<test>");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("a minimal grid file parses") {
  Dem dem = parse(
      "ncols 2\n"
      "nrows 2\n"
      "xllcorner 482500\n"
      "yllcorner 5634200\n"
      "cellsize 10\n"
      "1 2\n"
      "3 4\n");
  CHECK(dem.dimy() == 2);
  CHECK(dem.dimx() == 2);
  CHECK(dem.cellsize == 10.0);
  CHECK(dem.origin.easting == 482500.0);
  CHECK(dem.origin.northing == 5634200.0);
  CHECK(!dem.nodata.has_value());
  CHECK(dem.values(0, 0) == 1.0f);
  CHECK(dem.values(1, 1) == 4.0f);
}

TEST_CASE("header keys are case-insensitive and NODATA is optional") {
  Dem dem = parse(
      "NCOLS 2\nNROWS 2\nXLLCORNER 0\nYLLCORNER 0\nCELLSIZE 5\n"
      "nodata_value -9999\n"
      "-9999 1\n2 3\n");
  REQUIRE(dem.nodata.has_value());
  CHECK(*dem.nodata == -9999.0f);
  CHECK(dem.is_nodata(dem.values(0, 0)));
}

TEST_CASE("malformed inputs produce diagnostics, never crashes") {
  const char* cases[] = {
      // empty stream
      "",
      // missing nrows
      "ncols 4\nxllcorner 0\nyllcorner 0\ncellsize 10\n1 2 3 4\n",
      // keys out of order
      "nrows 2\nncols 2\nxllcorner 0\nyllcorner 0\ncellsize 10\n1 2 3 4\n",
      // non-numeric dimension
      "ncols abc\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 10\n1 2\n3 4\n",
      // fractional dimension
      "ncols 2.5\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 10\n1 2\n3 4\n",
      // nonpositive cellsize
      "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 0\n1 2\n3 4\n",
      // too small to be a grid
      "ncols 5\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 10\n1 2 3 4 5\n",
      // not enough cells
      "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 10\n1 2 3\n",
      // trailing junk
      "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 10\n1 2 3 4 5\n",
      // non-numeric cell
      "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 10\n1 2\n3 x\n",
      // bad nodata value
      "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 10\n"
      "NODATA_value oops\n1 2\n3 4\n",
      // declared size is absurd
      "ncols 1000000\nnrows 1000000\nxllcorner 0\nyllcorner 0\ncellsize 10\n",
  };
  for (const char* text : cases) {
    CHECK_THROWS_AS(parse(text), GridFormatError);
  }
}

TEST_CASE("arbitrary byte soup parses or diagnoses, never crashes") {
  std::mt19937 rng(123);
  const char alphabet[] = "0123456789.eE+-\n\t ncolsrwxy_NODATA";
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    int len = static_cast<int>(rng() % 200);
    for (int c = 0; c < len; ++c) {
      text += alphabet[rng() % (sizeof(alphabet) - 1)];
    }
    try {
      parse(text);
    } catch (const GridFormatError&) {
      // diagnosis is the expected outcome for nearly every input
    }
  }
}

TEST_CASE("cell diagnostics carry line and column") {
  try {
    parse("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 10\n1 2\n3 x\n");
    FAIL("expected a parse error");
  } catch (const GridFormatError& e) {
    CHECK(std::string(e.what()).find("7:3") != std::string::npos);
  }
}

TEST_CASE("missing header keys are named") {
  try {
    parse("ncols 4\nxllcorner 0\nyllcorner 0\ncellsize 10\n");
    FAIL("expected a parse error");
  } catch (const GridFormatError& e) {
    CHECK(std::string(e.what()).find("nrows") != std::string::npos);
  }
}

TEST_CASE("a DEM survives the write/read round trip bit for bit") {
  TempDir tmp;
  Dem dem = make_synthetic(SyntheticKind::SmoothedNoise, 12, 9, 10.0, 42);
  dem.origin.easting = 482500.0;
  dem.origin.northing = 5634200.0;
  dem.nodata = -9999.0f;
  fs::path p = tmp.path / "dem.asc";
  write_ascii_grid(dem, p);
  Dem back = read_ascii_grid(p);
  CHECK(back.values == dem.values);
  CHECK(back.cellsize == dem.cellsize);
  CHECK(back.origin.easting == dem.origin.easting);
  CHECK(back.origin.northing == dem.origin.northing);
  REQUIRE(back.nodata.has_value());
  CHECK(*back.nodata == *dem.nodata);
}

TEST_CASE("a zero grid writes as zeros under a correct header") {
  TempDir tmp;
  VsGrid vs;
  vs.units = Units::SquareMeters;
  vs.values.reset(3, 4, 0.0);
  fs::path p = tmp.path / "zero.asc";
  write_ascii_grid(vs, Units::SquareMeters, 25.0, GridOrigin{}, p);
  Dem back = read_ascii_grid(p);
  CHECK(back.dimy() == 3);
  CHECK(back.dimx() == 4);
  CHECK(back.cellsize == 25.0);
  for (float v : back.values.data()) CHECK(v == 0.0f);
}

TEST_CASE("viewshed grids written in both units differ by exactly 1e6") {
  TempDir tmp;
  VsGrid vs;
  vs.units = Units::SquareMeters;
  vs.values.reset(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) vs.values(i, j) = 1234.5 * (1 + i * 3 + j);
  }
  GridOrigin origin;
  fs::path m2 = tmp.path / "m2.asc";
  fs::path km2 = tmp.path / "km2.asc";
  write_ascii_grid(vs, Units::SquareMeters, 10.0, origin, m2);
  write_ascii_grid(vs, Units::SquareKilometers, 10.0, origin, km2);
  Dem a = read_ascii_grid(m2);
  Dem b = read_ascii_grid(km2);
  for (std::size_t n = 0; n < a.values.size(); ++n) {
    double ratio = a.values.data()[n] / b.values.data()[n];
    CHECK(ratio == doctest::Approx(1e6).epsilon(1e-6));
  }
}

TEST_CASE("heatmaps render deterministically with correct endpoints") {
  TempDir tmp;
  VsGrid flat;
  flat.values.reset(3, 3, 5.0);
  fs::path gray = tmp.path / "flat.pgm";
  write_heatmap(flat, gray, Palette::Gray);
  std::string bytes = slurp(gray);
  CHECK(bytes.substr(0, 3) == "P5\n");
  std::string pixels = bytes.substr(bytes.size() - 9);
  for (char c : pixels) CHECK(c == 0);

  VsGrid two;
  two.values.reset(1, 2, 0.0);
  two.values(0, 1) = 17.0;
  fs::path ppm = tmp.path / "two.ppm";
  write_heatmap(two, ppm, Palette::BlueRed);
  std::string rgb = slurp(ppm);
  CHECK(rgb.substr(0, 3) == "P6\n");
  std::string px = rgb.substr(rgb.size() - 6);
  CHECK(static_cast<unsigned char>(px[0]) == 0);    // low: blue
  CHECK(static_cast<unsigned char>(px[2]) == 255);
  CHECK(static_cast<unsigned char>(px[3]) == 255);  // high: red
  CHECK(static_cast<unsigned char>(px[5]) == 0);

  fs::path again = tmp.path / "two2.ppm";
  write_heatmap(two, again, Palette::BlueRed);
  CHECK(slurp(again) == rgb);
}

TEST_CASE("bench report throughput is internally consistent") {
  Dem dem = make_synthetic(SyntheticKind::SmoothedNoise, 24, 24, 10.0, 3);
  RunConfig cfg;
  cfg.ns = 36;
  cfg.workers = 2;
  EngineStats stats;
  total_viewshed(dem, cfg, &stats);
  BenchReport r = make_bench_report("noise24", 24, 24, cfg, stats);
  double recomputed = static_cast<double>(r.dimy) *
                      static_cast<double>(r.dimx) *
                      static_cast<double>(r.ns / 2) / r.scan_seconds;
  CHECK(r.povs_per_second == recomputed);

  std::string text = format_bench_report(r);
  for (const char* key :
       {"dataset:", "dimy:", "dimx:", "ns:", "workers:", "skew_seconds:",
        "scan_seconds:", "unskew_seconds:", "reduce_seconds:",
        "total_seconds:", "povs_per_second:"}) {
    CHECK(text.find(key) != std::string::npos);
  }
}

TEST_CASE("cli: total viewshed end to end, deterministically") {
  TempDir tmp;
  Dem dem = make_synthetic(SyntheticKind::SmoothedNoise, 24, 24, 10.0, 7);
  fs::path input = tmp.path / "in.asc";
  write_ascii_grid(dem, input);

  fs::path out1 = tmp.path / "out1.asc";
  fs::path out2 = tmp.path / "out2.asc";
  auto args = [&](const fs::path& out) {
    return std::vector<std::string>{
        "total",     "--input",  input.string(), "--output", out.string(),
        "--ns",      "36",       "--workers",    "2",        "--format",
        "both",      "--units",  "km2"};
  };
  CHECK(run_cli(args(out1)) == 0);
  CHECK(run_cli(args(out2)) == 0);
  CHECK(fs::exists(out1));
  CHECK(fs::exists(tmp.path / "out1.ppm"));
  CHECK(slurp(out1) == slurp(out2));
  CHECK(slurp(tmp.path / "out1.ppm") == slurp(tmp.path / "out2.ppm"));

  // heatmap-only output goes straight to the image path
  fs::path gray = tmp.path / "only.pgm";
  CHECK(run_cli({"total", "--input", input.string(), "--output", gray.string(),
                 "--ns", "36", "--workers", "2", "--format", "heatmap",
                 "--palette", "gray"}) == 0);
  CHECK(fs::exists(gray));
  CHECK(!fs::exists(tmp.path / "only.asc"));
  CHECK(slurp(gray).substr(0, 3) == "P5\n");
}

TEST_CASE("cli: the reference subcommand refuses oversized grids") {
  TempDir tmp;
  Dem dem = make_synthetic(SyntheticKind::Flat, 300, 300, 10.0);
  fs::path input = tmp.path / "big.asc";
  write_ascii_grid(dem, input);
  fs::path out = tmp.path / "ref.asc";
  int code = run_cli({"reference", "--input", input.string(), "--output",
                      out.string(), "--ns", "4"});
  CHECK(code == 2);
  CHECK(!fs::exists(out));
}

TEST_CASE("cli: single and multi observers") {
  TempDir tmp;
  Dem dem = make_synthetic(SyntheticKind::SmoothedNoise, 20, 20, 10.0, 5);
  fs::path input = tmp.path / "in.asc";
  write_ascii_grid(dem, input);

  CHECK(run_cli({"single", "--input", input.string(), "--pov", "5,5", "--ns",
                 "36"}) == 0);
  CHECK(run_cli({"single", "--input", input.string(), "--pov", "99,5", "--ns",
                 "36"}) == 2);

  fs::path g1 = tmp.path / "multi1.asc";
  fs::path g2 = tmp.path / "multi2.asc";
  auto margs = [&](const fs::path& out) {
    return std::vector<std::string>{
        "multi", "--input", input.string(), "--count", "5",
        "--seed", "7",      "--ns",         "36",      "--output",
        out.string()};
  };
  CHECK(run_cli(margs(g1)) == 0);
  CHECK(run_cli(margs(g2)) == 0);
  CHECK(slurp(g1) == slurp(g2));

  fs::path pov_file = tmp.path / "povs.txt";
  std::ofstream(pov_file) << "3 4\n10 11\n";
  CHECK(run_cli({"multi", "--input", input.string(), "--povs",
                 pov_file.string(), "--ns", "36"}) == 0);
  CHECK(run_cli({"multi", "--input", input.string(), "--ns", "36"}) == 2);
}

TEST_CASE("cli: bench emits one block per configuration") {
  TempDir tmp;
  Dem dem = make_synthetic(SyntheticKind::SmoothedNoise, 16, 16, 10.0, 2);
  fs::path input = tmp.path / "in.asc";
  write_ascii_grid(dem, input);
  CHECK(run_cli({"bench", "--input", input.string(), "--workers", "1,2,4",
                 "--ns", "36"}) == 0);
  CHECK(run_cli({"bench", "--input", input.string(), "--workers", "0,2",
                 "--ns", "36"}) == 2);
}

TEST_CASE("cli: worker count falls back to the environment variable") {
  TempDir tmp;
  Dem dem = make_synthetic(SyntheticKind::SmoothedNoise, 12, 12, 10.0, 3);
  fs::path input = tmp.path / "in.asc";
  write_ascii_grid(dem, input);
  fs::path out = tmp.path / "out.asc";

  setenv("SKEWSHED_WORKERS", "3", 1);
  CHECK(run_cli({"total", "--input", input.string(), "--output", out.string(),
                 "--ns", "36"}) == 0);
  setenv("SKEWSHED_WORKERS", "banana", 1);  // ignored with a warning
  CHECK(run_cli({"total", "--input", input.string(), "--output", out.string(),
                 "--ns", "36"}) == 0);
  unsetenv("SKEWSHED_WORKERS");
}

TEST_CASE("cli: fill removes nodata so the engine can run") {
  TempDir tmp;
  Dem dem = make_synthetic(SyntheticKind::SmoothedNoise, 12, 12, 10.0, 4);
  dem.nodata = -9999.0f;
  dem.values(0, 0) = -9999.0f;
  dem.values(6, 7) = -9999.0f;
  fs::path holed = tmp.path / "holed.asc";
  write_ascii_grid(dem, holed);

  fs::path out = tmp.path / "tvs.asc";
  CHECK(run_cli({"total", "--input", holed.string(), "--output", out.string(),
                 "--ns", "36"}) == 2);

  fs::path filled = tmp.path / "filled.asc";
  CHECK(run_cli({"fill", "--input", holed.string(), "--output",
                 filled.string()}) == 0);
  Dem filled_dem = read_ascii_grid(filled);
  CHECK(!filled_dem.has_nodata_cells());
  CHECK(run_cli({"total", "--input", filled.string(), "--output", out.string(),
                 "--ns", "36"}) == 0);
}

TEST_CASE("cli: usage errors exit with 1") {
  CHECK(run_cli({}) == 1);
  CHECK(run_cli({"explode"}) == 1);
  CHECK(run_cli({"total"}) == 1);  // --input and --output are required
  CHECK(run_cli({"total", "--input", "x.asc", "--output", "y.asc",
                 "--no-such-flag"}) == 1);
  CHECK(run_cli({"--help"}) == 0);
}

TEST_CASE("cli: a missing input file is a runtime error") {
  TempDir tmp;
  fs::path out = tmp.path / "out.asc";
  CHECK(run_cli({"total", "--input", (tmp.path / "absent.asc").string(),
                 "--output", out.string()}) == 2);
}
