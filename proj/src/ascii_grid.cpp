#include "skewshed/ascii_grid.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

namespace skewshed {

namespace {

// Whitespace-separated tokens with their line and column, for
// diagnostics. Lines and columns are 1-based.
class Tokenizer {
 public:
  Tokenizer(std::istream& in, std::string_view source)
      : in_(in), source_(source) {}

  struct Token {
    std::string text;
    int line = 0;
    int col = 0;
  };

  // Returns false at end of input.
  bool next(Token& out) {
    for (;;) {
      if (pos_ >= line_.size()) {
        if (!std::getline(in_, line_)) return false;
        ++line_no_;
        pos_ = 0;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(line_[pos_]))) {
        ++pos_;
        continue;
      }
      std::size_t start = pos_;
      while (pos_ < line_.size() &&
             !std::isspace(static_cast<unsigned char>(line_[pos_]))) {
        ++pos_;
      }
      out.text = line_.substr(start, pos_ - start);
      out.line = line_no_;
      out.col = static_cast<int>(start) + 1;
      return true;
    }
  }

  [[noreturn]] void fail(const Token& at, const std::string& what) const {
    std::ostringstream os;
    os << source_ << ":" << at.line << ":" << at.col << ": " << what;
    throw GridFormatError(os.str());
  }

  [[noreturn]] void fail_eof(const std::string& what) const {
    std::ostringstream os;
    os << source_ << ":" << line_no_ << ": " << what;
    throw GridFormatError(os.str());
  }

 private:
  std::istream& in_;
  std::string source_;
  std::string line_;
  std::size_t pos_ = 0;
  int line_no_ = 0;
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

double parse_double(Tokenizer& tok, const Tokenizer::Token& t,
                    const char* what) {
  double value = 0.0;
  const char* begin = t.text.data();
  const char* end = begin + t.text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    tok.fail(t, std::string("expected a number for ") + what + ", got '" +
                    t.text + "'");
  }
  return value;
}

long parse_int(Tokenizer& tok, const Tokenizer::Token& t, const char* what) {
  long value = 0;
  const char* begin = t.text.data();
  const char* end = begin + t.text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    tok.fail(t, std::string("expected an integer for ") + what + ", got '" +
                    t.text + "'");
  }
  return value;
}

constexpr long long kMaxCells = 1LL << 31;

}  // namespace

Dem read_ascii_grid(std::istream& in, std::string_view source_name) {
  Tokenizer tok(in, source_name);
  Tokenizer::Token t;

  auto expect_key = [&](const char* key) {
    if (!tok.next(t)) {
      tok.fail_eof(std::string("missing header key '") + key + "'");
    }
    if (lower(t.text) != key) {
      tok.fail(t, std::string("expected header key '") + key + "', got '" +
                      t.text + "'");
    }
    if (!tok.next(t)) {
      tok.fail_eof(std::string("missing value for header key '") + key + "'");
    }
  };

  expect_key("ncols");
  long ncols = parse_int(tok, t, "ncols");
  expect_key("nrows");
  long nrows = parse_int(tok, t, "nrows");
  expect_key("xllcorner");
  double xll = parse_double(tok, t, "xllcorner");
  expect_key("yllcorner");
  double yll = parse_double(tok, t, "yllcorner");
  expect_key("cellsize");
  double cellsize = parse_double(tok, t, "cellsize");

  if (ncols < 2 || nrows < 2) {
    std::ostringstream os;
    os << source_name << ": grid must be at least 2x2, header declares "
       << nrows << "x" << ncols;
    throw GridFormatError(os.str());
  }
  if (static_cast<long long>(ncols) * nrows > kMaxCells) {
    std::ostringstream os;
    os << source_name << ": declared grid " << nrows << "x" << ncols
       << " is too large";
    throw GridFormatError(os.str());
  }
  if (!(cellsize > 0.0)) {
    std::ostringstream os;
    os << source_name << ": cellsize must be positive, got " << cellsize;
    throw GridFormatError(os.str());
  }

  Dem dem;
  dem.cellsize = cellsize;
  dem.origin.easting = xll;
  dem.origin.northing = yll;
  dem.values.reset(static_cast<int>(nrows), static_cast<int>(ncols), 0.0f);

  // The NODATA_value line is optional; anything else must be the first
  // cell.
  if (!tok.next(t)) tok.fail_eof("no cell values after the header");
  if (lower(t.text) == "nodata_value") {
    if (!tok.next(t)) tok.fail_eof("missing value for header key 'NODATA_value'");
    dem.nodata = static_cast<float>(parse_double(tok, t, "NODATA_value"));
    if (!tok.next(t)) tok.fail_eof("no cell values after the header");
  }

  long long total = static_cast<long long>(ncols) * nrows;
  long long count = 0;
  for (;;) {
    dem.values.data()[static_cast<std::size_t>(count)] =
        static_cast<float>(parse_double(tok, t, "cell value"));
    ++count;
    if (count == total) break;
    if (!tok.next(t)) {
      std::ostringstream os;
      os << "unexpected end of data: expected " << total << " cell values, got "
         << count;
      tok.fail_eof(os.str());
    }
  }
  if (tok.next(t)) {
    tok.fail(t, "trailing data after the last cell value");
  }

  auto errors = validate(dem);
  if (!errors.empty()) {
    std::ostringstream os;
    os << source_name << ": " << errors.front();
    throw GridFormatError(os.str());
  }
  return dem;
}

Dem read_ascii_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw GridFormatError("cannot open '" + path.string() + "' for reading");
  }
  return read_ascii_grid(in, path.string());
}

namespace {

void write_header(std::ostream& out, int ncols, int nrows,
                  const GridOrigin& origin, double cellsize) {
  char buf[64];
  out << "ncols " << ncols << "\n";
  out << "nrows " << nrows << "\n";
  std::snprintf(buf, sizeof(buf), "%.10g", origin.easting);
  out << "xllcorner " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.10g", origin.northing);
  out << "yllcorner " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.10g", cellsize);
  out << "cellsize " << buf << "\n";
}

void require_writable(std::ofstream& out, const std::filesystem::path& path) {
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() +
                             "' for writing");
  }
}

}  // namespace

void write_ascii_grid(const Dem& dem, const std::filesystem::path& path) {
  std::ofstream out(path);
  require_writable(out, path);
  write_header(out, dem.dimx(), dem.dimy(), dem.origin, dem.cellsize);
  char buf[64];
  if (dem.nodata.has_value()) {
    std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(*dem.nodata));
    out << "NODATA_value " << buf << "\n";
  }
  for (int i = 0; i < dem.dimy(); ++i) {
    const float* row = dem.values.row(i);
    for (int j = 0; j < dem.dimx(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(row[j]));
      out << buf << (j + 1 == dem.dimx() ? "\n" : " ");
    }
  }
  if (!out) {
    throw std::runtime_error("failed while writing '" + path.string() + "'");
  }
}

void write_ascii_grid(const VsGrid& grid, Units out_units, double cellsize,
                      const GridOrigin& origin,
                      const std::filesystem::path& path) {
  const VsGrid* src = &grid;
  VsGrid converted;
  if (grid.units != out_units) {
    converted = convert_units(grid, out_units);
    src = &converted;
  }
  std::ofstream out(path);
  require_writable(out, path);
  write_header(out, src->values.cols(), src->values.rows(), origin, cellsize);
  char buf[64];
  for (int i = 0; i < src->values.rows(); ++i) {
    const double* row = src->values.row(i);
    for (int j = 0; j < src->values.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.10g", row[j]);
      out << buf << (j + 1 == src->values.cols() ? "\n" : " ");
    }
  }
  if (!out) {
    throw std::runtime_error("failed while writing '" + path.string() + "'");
  }
}

}  // namespace skewshed
