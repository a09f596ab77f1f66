#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "rdpq/simd.hpp"

namespace rdpq::simd {
namespace {

inline double horizontalSum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double horizontalMax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

inline __m256d absMask() { return _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL)); }
inline __m256d signMask() {
  return _mm256_castsi256_pd(_mm256_set1_epi64x(static_cast<long long>(0x8000000000000000ULL)));
}

double dotAvx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = horizontalSum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weightedSumSquaresAvx2(const double* w, const double* f, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(f + i);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_mul_pd(x, x), acc);
  }
  double s = horizontalSum(acc);
  for (; i < n; ++i) s += w[i] * (f[i] * f[i]);
  return s;
}

double maxAbsAvx2(const double* f, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_and_pd(_mm256_loadu_pd(f + i), absMask()));
  double r = horizontalMax(m);
  for (; i < n; ++i) r = std::max(r, std::fabs(f[i]));
  return r;
}

void gemvAvx2(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dotAvx2(a + r * cols, x, cols);
}

void zoomQuantizeAvx2(const double* in, double* out, std::size_t n, double mu, double step,
                      double maxLevel) {
  const __m256d vmu = _mm256_set1_pd(mu);
  const __m256d vstep = _mm256_set1_pd(step);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d vmax = _mm256_set1_pd(maxLevel);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_div_pd(_mm256_div_pd(_mm256_loadu_pd(in + i), vmu), vstep);
    __m256d level = _mm256_floor_pd(_mm256_add_pd(_mm256_and_pd(r, absMask()), half));
    level = _mm256_min_pd(level, vmax);
    const __m256d signedLevel = _mm256_or_pd(level, _mm256_and_pd(r, signMask()));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_mul_pd(signedLevel, vstep), vmu));
  }
  for (; i < n; ++i) {
    const double r = (in[i] / mu) / step;
    double level = std::floor(std::fabs(r) + 0.5);
    level = std::min(level, maxLevel);
    out[i] = (std::copysign(level, r) * step) * mu;
  }
}

void stencil3Avx2(const double* u, double* out, std::size_t n, double center, double side) {
  const __m256d c = _mm256_set1_pd(center);
  const __m256d s = _mm256_set1_pd(side);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d left = _mm256_loadu_pd(u + i);
    const __m256d mid = _mm256_loadu_pd(u + i + 1);
    const __m256d right = _mm256_loadu_pd(u + i + 2);
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_mul_pd(c, mid), _mm256_mul_pd(s, _mm256_add_pd(left, right))));
  }
  for (; i < n; ++i) out[i] = center * u[i + 1] + side * (u[i] + u[i + 2]);
}

}  // namespace

const KernelTable& detail::avx2Table() {
  static const KernelTable table{dotAvx2,  weightedSumSquaresAvx2, maxAbsAvx2,
                                 gemvAvx2, zoomQuantizeAvx2,       stencil3Avx2};
  return table;
}

}  // namespace rdpq::simd
