#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace skewshed {

/// Row-major 2D array. Row 0 is the northernmost row, column 0 the
/// westernmost column.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(checked_size(rows, cols), fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int i, int j) { return data_[index(i, j)]; }
  const T& operator()(int i, int j) const { return data_[index(i, j)]; }

  T* row(int i) { return data_.data() + static_cast<std::size_t>(i) * cols_; }
  const T* row(int i) const {
    return data_.data() + static_cast<std::size_t>(i) * cols_;
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  /// Reshape and refill; reuses the existing allocation when possible.
  void reset(int rows, int cols, T fill = T{}) {
    std::size_t n = checked_size(rows, cols);
    rows_ = rows;
    cols_ = cols;
    data_.assign(n, fill);
  }

  bool same_shape(const Grid& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  static std::size_t checked_size(int rows, int cols) {
    if (rows < 0 || cols < 0) {
      throw std::invalid_argument("grid dimensions must be non-negative");
    }
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * cols_ + static_cast<std::size_t>(j);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

}  // namespace skewshed
