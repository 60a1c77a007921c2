#include "skewshed/skew.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace skewshed {

namespace {

// Row offset that keeps every destination index p = base + i - dest >= 1,
// so the p-1 write never leaves the grid. For square and tall grids this
// is src_rows, giving the usual 2*rows x cols layout; only a grid wider
// than tall at a steep shear needs more headroom.
int base_offset(int src_rows, int cols, double shear_tan) {
  int dest_max = static_cast<int>(shear_tan * (cols - 1));
  return std::max(src_rows, dest_max + 1);
}

}  // namespace

SectorPlan plan_sector(int k, int ns, int dimy, int dimx) {
  if (ns < 2 || ns % 2 != 0) {
    throw std::invalid_argument("sector count must be an even integer >= 2");
  }
  if (k < 0 || k >= ns / 2) {
    std::ostringstream os;
    os << "sector index " << k << " out of range [0, " << ns / 2 << ")";
    throw std::out_of_range(os.str());
  }
  if (dimy < 1 || dimx < 1) {
    throw std::invalid_argument("grid dimensions must be positive");
  }

  SectorPlan plan;
  plan.sector_index = k;
  plan.ns = ns;
  plan.sector_deg = k * (360.0 / ns);
  plan.src_rows = dimy;
  plan.src_cols = dimx;

  // Octant reduction. Azimuth s is measured from the +x (column) axis
  // toward the +y (row) axis; the line family of the folded grid always
  // has slope tan(shear_deg) in [0, 1].
  double s = plan.sector_deg;
  if (s <= 45.0) {
    plan.shear_deg = s;
  } else if (s <= 90.0) {
    plan.shear_deg = 90.0 - s;
    plan.pre_ops = {AxisOp::Transpose};
  } else if (s < 135.0) {
    plan.shear_deg = s - 90.0;
    plan.pre_ops = {AxisOp::Transpose, AxisOp::FlipCols};
  } else {
    plan.shear_deg = 180.0 - s;
    plan.pre_ops = {AxisOp::FlipCols};
  }

  // Pin the octant corners so integer shears stay exact.
  if (plan.shear_deg == 0.0) {
    plan.shear_tan = 0.0;
  } else if (plan.shear_deg == 45.0) {
    plan.shear_tan = 1.0;
  } else {
    plan.shear_tan = std::tan(plan.shear_deg * std::numbers::pi / 180.0);
  }

  // Track the grid shape through the ops and compose the inverse index
  // map. Each op is self-inverse, so mapping back means substituting the
  // op's own index transform into the map built so far.
  int rows = dimy;
  int cols = dimx;
  IndexMap m;
  for (AxisOp op : plan.pre_ops) {
    switch (op) {
      case AxisOp::Transpose:
        m = IndexMap{m.ij, m.ii, m.ci, m.jj, m.ji, m.cj};
        std::swap(rows, cols);
        break;
      case AxisOp::FlipCols:
        m = IndexMap{m.ii,  -m.ij, m.ci + m.ij * (cols - 1),
                     m.ji,  -m.jj, m.cj + m.jj * (cols - 1)};
        break;
      case AxisOp::FlipRows:
        m = IndexMap{-m.ii, m.ij, m.ci + m.ii * (rows - 1),
                     -m.ji, m.jj, m.cj + m.ji * (rows - 1)};
        break;
    }
  }
  plan.rows = rows;
  plan.cols = cols;
  plan.to_source = m;
  return plan;
}

ShearParams shear_params(double shear_tan, int j) {
  double y = shear_tan * j;
  int dest = static_cast<int>(y);  // y >= 0, truncation is floor
  return {dest, y - dest};
}

void apply_pre_ops(const Grid<float>& g, std::span<const AxisOp> ops,
                   Grid<float>& out) {
  out.reset(g.rows(), g.cols());
  out.data() = g.data();
  for (AxisOp op : ops) {
    switch (op) {
      case AxisOp::Transpose: {
        Grid<float> t(out.cols(), out.rows());
        for (int i = 0; i < out.rows(); ++i) {
          for (int j = 0; j < out.cols(); ++j) {
            t(j, i) = out(i, j);
          }
        }
        out = std::move(t);
        break;
      }
      case AxisOp::FlipCols:
        for (int i = 0; i < out.rows(); ++i) {
          float* row = out.row(i);
          for (int j = 0, k = out.cols() - 1; j < k; ++j, --k) {
            std::swap(row[j], row[k]);
          }
        }
        break;
      case AxisOp::FlipRows:
        for (int i = 0, k = out.rows() - 1; i < k; ++i, --k) {
          float* a = out.row(i);
          float* b = out.row(k);
          for (int j = 0; j < out.cols(); ++j) std::swap(a[j], b[j]);
        }
        break;
    }
  }
}

Grid<float> apply_pre_ops(const Grid<float>& g, std::span<const AxisOp> ops) {
  Grid<float> out;
  apply_pre_ops(g, ops, out);
  return out;
}

void build_skw(const Grid<float>& g, double shear_tan, SkwGrid& out) {
  if (g.rows() < 1 || g.cols() < 1) {
    throw std::invalid_argument("cannot shear an empty grid");
  }
  if (!(shear_tan >= 0.0 && shear_tan <= 1.0)) {
    throw std::invalid_argument("shear_tan must lie in [0, 1]");
  }

  int rows = g.rows();
  int cols = g.cols();
  int base = base_offset(rows, cols, shear_tan);

  out.src_rows = rows;
  out.cols = cols;
  out.base = base;
  out.shear_tan = shear_tan;
  out.values.reset(base + rows, cols, 0.0f);
  out.weights.reset(base + rows, cols, 0.0f);

  // Column displacement does not depend on the row.
  std::vector<int> dest(cols);
  std::vector<float> frac(cols);
  for (int j = 0; j < cols; ++j) {
    ShearParams sp = shear_params(shear_tan, j);
    dest[j] = sp.dest;
    frac[j] = static_cast<float>(sp.frac);
  }

  for (int i = 0; i < rows; ++i) {
    const float* src = g.row(i);
    for (int j = 0; j < cols; ++j) {
      int p = base + i - dest[j];
      float f = frac[j];
      float v = src[j];
      out.values(p, j) += (1.0f - f) * v;
      out.values(p - 1, j) += f * v;
      out.weights(p, j) += 1.0f - f;
      out.weights(p - 1, j) += f;
    }
  }

  // Full-weight cells form one interval per row because the displacement
  // is monotone in j; scanning from both ends finds it.
  out.row_ranges.assign(base + rows, {0, 0});
  for (int q = 0; q < base + rows; ++q) {
    const float* w = out.weights.row(q);
    int first = 0;
    while (first < cols && !full_weight(w[first])) ++first;
    int last = cols;
    while (last > first && !full_weight(w[last - 1])) --last;
    out.row_ranges[q] = first < last ? std::pair{first, last} : std::pair{0, 0};
  }
}

SkwGrid build_skw(const Grid<float>& g, double shear_tan) {
  SkwGrid out;
  build_skw(g, shear_tan, out);
  return out;
}

void unskew_accumulate(const Grid<double>& skw_vs, const SectorPlan& plan,
                       Grid<double>& out) {
  int rows = plan.rows;
  int cols = plan.cols;
  int base = base_offset(rows, cols, plan.shear_tan);
  if (skw_vs.rows() != base + rows || skw_vs.cols() != cols) {
    std::ostringstream os;
    os << "skewed grid shape " << skw_vs.rows() << "x" << skw_vs.cols()
       << " does not match plan (" << base + rows << "x" << cols << ")";
    throw std::invalid_argument(os.str());
  }
  if (out.rows() != plan.src_rows || out.cols() != plan.src_cols) {
    std::ostringstream os;
    os << "output shape " << out.rows() << "x" << out.cols()
       << " does not match source grid " << plan.src_rows << "x"
       << plan.src_cols;
    throw std::invalid_argument(os.str());
  }

  std::vector<int> dest(cols);
  std::vector<double> frac(cols);
  for (int j = 0; j < cols; ++j) {
    ShearParams sp = shear_params(plan.shear_tan, j);
    dest[j] = sp.dest;
    frac[j] = sp.frac;
  }

  // Reconstructs the shear's weight at (q, j); the classification must
  // match what build_skw derived from its accumulated weight grid.
  auto covered = [&](int q, int j) {
    int i_main = q - base + dest[j];       // received 1 - frac
    int i_carry = q - base + dest[j] + 1;  // received frac
    double w = 0.0;
    if (i_main >= 0 && i_main < rows) w += 1.0 - frac[j];
    if (i_carry >= 0 && i_carry < rows) w += frac[j];
    return w > 1.0 - kFullWeightTol && w < 1.0 + kFullWeightTol;
  };

  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      int p = base + i - dest[j];
      double r = frac[j];
      // The first and last cell of every column lose one of their two
      // destination rows to the skew border, where no viewshed was
      // computed; those read the surviving covered cell at full weight.
      bool a = covered(p, j);
      bool b = covered(p - 1, j);
      double v;
      if (a && b) {
        v = (1.0 - r) * skw_vs(p, j) + r * skw_vs(p - 1, j);
      } else if (a) {
        v = skw_vs(p, j);
      } else {
        v = skw_vs(p - 1, j);
      }
      auto [si, sj] = plan.to_source(i, j);
      out(si, sj) += v;
    }
  }
}

}  // namespace skewshed
