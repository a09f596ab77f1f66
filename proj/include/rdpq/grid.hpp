#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rdpq {

/// Uniform node set x_i = i/Nx, i = 0..Nx, on [0,1].
class Grid {
 public:
  explicit Grid(std::size_t intervals);

  std::size_t intervals() const { return intervals_; }
  std::size_t size() const { return intervals_ + 1; }
  double spacing() const { return spacing_; }
  double node(std::size_t i) const { return static_cast<double>(i) / static_cast<double>(intervals_); }
  std::span<const double> nodes() const { return nodes_; }

  /// Composite-trapezoid weights over the whole interval.
  std::span<const double> trapezoidWeights() const { return weights_; }

  friend bool operator==(const Grid& a, const Grid& b) { return a.intervals_ == b.intervals_; }

 private:
  std::size_t intervals_;
  double spacing_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Row-major dense matrix; the transform operators are stored this way so a
/// transform is one mat-vec.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
};

}  // namespace rdpq
