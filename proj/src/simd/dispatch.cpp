#include <atomic>
#include <cstdlib>
#include <string>

#include "rdpq/errors.hpp"
#include "rdpq/simd.hpp"

namespace rdpq::simd {
namespace {

bool cpuHasAvx2() {
#if defined(RDPQ_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initialBackend() {
  if (const char* env = std::getenv("RDPQ_SIMD")) {
    if (std::string(env) == "scalar") return Backend::Scalar;
  }
  return cpuHasAvx2() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{initialBackend()};
  return backend;
}

}  // namespace

bool backendAvailable(Backend b) { return b == Backend::Scalar || cpuHasAvx2(); }

Backend activeBackend() { return current().load(std::memory_order_relaxed); }

std::string_view backendName(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

void setBackend(Backend b) {
  if (!backendAvailable(b)) throw ConfigError("SIMD backend '" + std::string(backendName(b)) + "' is not available");
  current().store(b, std::memory_order_relaxed);
}

const KernelTable& kernelsFor(Backend b) {
#if defined(RDPQ_HAVE_AVX2)
  if (b == Backend::Avx2 && cpuHasAvx2()) return detail::avx2Table();
#endif
  (void)b;
  return detail::scalarTable();
}

const KernelTable& kernels() { return kernelsFor(activeBackend()); }

double dot(std::span<const double> a, std::span<const double> b) {
  return kernels().dot(a.data(), b.data(), std::min(a.size(), b.size()));
}

double weightedSumSquares(std::span<const double> w, std::span<const double> f) {
  return kernels().weightedSumSquares(w.data(), f.data(), std::min(w.size(), f.size()));
}

double maxAbs(std::span<const double> f) { return kernels().maxAbs(f.data(), f.size()); }

void gemv(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
          std::span<double> y) {
  kernels().gemv(a.data(), rows, cols, x.data(), y.data());
}

void zoomQuantize(std::span<const double> in, std::span<double> out, double mu, double step,
                  double maxLevel) {
  kernels().zoomQuantize(in.data(), out.data(), std::min(in.size(), out.size()), mu, step, maxLevel);
}

void stencil3(std::span<const double> u, std::span<double> out, double center, double side) {
  kernels().stencil3(u.data(), out.data(), out.size(), center, side);
}

}  // namespace rdpq::simd
