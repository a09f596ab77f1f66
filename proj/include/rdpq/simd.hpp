#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference in
// kernels_scalar.cpp; an AVX2/FMA variant is picked at runtime when the CPU
// supports it. Element-wise kernels agree bit-for-bit across backends;
// reductions agree up to summation order.

#include <cstddef>
#include <span>
#include <string_view>

namespace rdpq::simd {

enum class Backend { Scalar, Avx2 };

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*weightedSumSquares)(const double* w, const double* f, std::size_t n);
  double (*maxAbs)(const double* f, std::size_t n);
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
  void (*zoomQuantize)(const double* in, double* out, std::size_t n, double mu, double step,
                       double maxLevel);
  void (*stencil3)(const double* u, double* out, std::size_t n, double center, double side);
};

Backend activeBackend();
std::string_view backendName(Backend b);
bool backendAvailable(Backend b);

/// Overrides the runtime choice (tests use this to compare backends). Throws
/// ConfigError if the backend is not available on this CPU/build.
void setBackend(Backend b);

const KernelTable& kernels();
const KernelTable& kernelsFor(Backend b);

// Convenience wrappers over the active table.

double dot(std::span<const double> a, std::span<const double> b);

/// sum_i w_i f_i^2
double weightedSumSquares(std::span<const double> w, std::span<const double> f);

double maxAbs(std::span<const double> f);

/// y = A x with A row-major rows x cols.
void gemv(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
          std::span<double> y);

/// out_i = mu * step * clamp(round_half_away(in_i / mu / step), -maxLevel, maxLevel)
void zoomQuantize(std::span<const double> in, std::span<double> out, double mu, double step,
                  double maxLevel);

/// out_i = center * u_{i+1} + side * (u_i + u_{i+2}) for i = 0..n-1; u has n+2 entries.
void stencil3(std::span<const double> u, std::span<double> out, double center, double side);

namespace detail {
const KernelTable& scalarTable();
#if defined(RDPQ_HAVE_AVX2)
const KernelTable& avx2Table();
#endif
}  // namespace detail

}  // namespace rdpq::simd
