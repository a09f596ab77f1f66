#include <algorithm>
#include <cmath>

#include "rdpq/simd.hpp"

namespace rdpq::simd {
namespace {

double dotScalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weightedSumSquaresScalar(const double* w, const double* f, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * (f[i] * f[i]);
  return s;
}

double maxAbsScalar(const double* f, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(f[i]));
  return m;
}

void gemvScalar(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dotScalar(a + r * cols, x, cols);
}

void zoomQuantizeScalar(const double* in, double* out, std::size_t n, double mu, double step,
                        double maxLevel) {
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (in[i] / mu) / step;
    double level = std::floor(std::fabs(r) + 0.5);
    level = std::min(level, maxLevel);
    out[i] = (std::copysign(level, r) * step) * mu;
  }
}

void stencil3Scalar(const double* u, double* out, std::size_t n, double center, double side) {
  for (std::size_t i = 0; i < n; ++i) out[i] = center * u[i + 1] + side * (u[i] + u[i + 2]);
}

}  // namespace

const KernelTable& detail::scalarTable() {
  static const KernelTable table{dotScalar,  weightedSumSquaresScalar, maxAbsScalar,
                                 gemvScalar, zoomQuantizeScalar,       stencil3Scalar};
  return table;
}

}  // namespace rdpq::simd
