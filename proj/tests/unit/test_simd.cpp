#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "rdpq/errors.hpp"
#include "rdpq/simd.hpp"

using namespace rdpq;

namespace {

std::vector<double> randomVector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

struct BackendGuard {
  simd::Backend saved = simd::activeBackend();
  ~BackendGuard() { simd::setBackend(saved); }
};

}  // namespace

TEST_CASE("scalar backend is always available") {
  CHECK(simd::backendAvailable(simd::Backend::Scalar));
  CHECK(simd::backendName(simd::Backend::Scalar) == "scalar");
}

TEST_CASE("scalar kernels match naive loops") {
  const auto& s = simd::kernelsFor(simd::Backend::Scalar);
  const std::vector<double> a{1.0, -2.0, 3.0, 0.5, 4.0};
  const std::vector<double> b{2.0, 1.0, -1.0, 4.0, 0.25};
  CHECK(s.dot(a.data(), b.data(), a.size()) == doctest::Approx(2.0 - 2.0 - 3.0 + 2.0 + 1.0));
  CHECK(s.weightedSumSquares(b.data(), a.data(), a.size()) ==
        doctest::Approx(2.0 * 1.0 + 1.0 * 4.0 - 9.0 + 4.0 * 0.25 + 0.25 * 16.0));
  CHECK(s.maxAbs(a.data(), a.size()) == 4.0);

  const std::vector<double> m{1, 2, 3, 4, 5, 6};
  const std::vector<double> x{1, 0, -1};
  std::vector<double> y(2);
  s.gemv(m.data(), 2, 3, x.data(), y.data());
  CHECK(y[0] == -2.0);
  CHECK(y[1] == -2.0);

  const std::vector<double> in{0.3, -0.3, 0.0, 10.0};
  std::vector<double> out(in.size());
  s.zoomQuantize(in.data(), out.data(), in.size(), 1.0, 0.25, 8.0);
  CHECK(out[0] == 0.25);
  CHECK(out[1] == -0.25);
  CHECK(out[2] == 0.0);
  CHECK(out[3] == 2.0);  // clamped at 8 levels

  const std::vector<double> u{1, 2, 4, 8};
  std::vector<double> st(2);
  s.stencil3(u.data(), st.data(), 2, 0.5, 0.25);
  CHECK(st[0] == 0.5 * 2 + 0.25 * (1 + 4));
  CHECK(st[1] == 0.5 * 4 + 0.25 * (2 + 8));
}

TEST_CASE("every available backend agrees with the scalar reference") {
  std::mt19937_64 rng(7);
  const auto& ref = simd::kernelsFor(simd::Backend::Scalar);
  for (const auto backend : {simd::Backend::Scalar, simd::Backend::Avx2}) {
    if (!simd::backendAvailable(backend)) continue;
    CAPTURE(simd::backendName(backend));
    const auto& k = simd::kernelsFor(backend);
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 201u, 1003u}) {
      CAPTURE(n);
      const auto a = randomVector(n, rng);
      const auto b = randomVector(n, rng);
      const auto w = randomVector(n, rng);
      const double dr = ref.dot(a.data(), b.data(), n);
      CHECK(std::abs(k.dot(a.data(), b.data(), n) - dr) <= 1e-13 * (1.0 + std::abs(dr)) * std::sqrt(n + 1.0));
      const double sr = ref.weightedSumSquares(w.data(), a.data(), n);
      CHECK(std::abs(k.weightedSumSquares(w.data(), a.data(), n) - sr) <= 1e-13 * (1.0 + std::abs(sr)) * std::sqrt(n + 1.0));
      CHECK(k.maxAbs(a.data(), n) == ref.maxAbs(a.data(), n));

      const auto in = randomVector(n, rng, 30.0);
      std::vector<double> q1(n), q2(n);
      ref.zoomQuantize(in.data(), q1.data(), n, 1.7, 0.01, 500.0);
      k.zoomQuantize(in.data(), q2.data(), n, 1.7, 0.01, 500.0);
      CHECK(q1 == q2);

      const auto u = randomVector(n + 2, rng);
      std::vector<double> s1(n), s2(n);
      ref.stencil3(u.data(), s1.data(), n, 0.3, 0.7);
      k.stencil3(u.data(), s2.data(), n, 0.3, 0.7);
      CHECK(s1 == s2);
    }
    const std::size_t rows = 37, cols = 201;
    const auto m = randomVector(rows * cols, rng);
    const auto x = randomVector(cols, rng);
    std::vector<double> y1(rows), y2(rows);
    ref.gemv(m.data(), rows, cols, x.data(), y1.data());
    k.gemv(m.data(), rows, cols, x.data(), y2.data());
    for (std::size_t i = 0; i < rows; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-12 * (1.0 + std::abs(y1[i])));
  }
}

TEST_CASE("quantization ties round away from zero in every backend") {
  for (const auto backend : {simd::Backend::Scalar, simd::Backend::Avx2}) {
    if (!simd::backendAvailable(backend)) continue;
    const auto& k = simd::kernelsFor(backend);
    const std::vector<double> in{0.5, -0.5, 1.5, -2.5, 0.49999999999};
    std::vector<double> out(in.size());
    k.zoomQuantize(in.data(), out.data(), in.size(), 1.0, 1.0, 100.0);
    CHECK(out == std::vector<double>{1.0, -1.0, 2.0, -3.0, 0.0});
  }
}

TEST_CASE("setBackend switches the active table and rejects unavailable backends") {
  BackendGuard guard;
  simd::setBackend(simd::Backend::Scalar);
  CHECK(simd::activeBackend() == simd::Backend::Scalar);
  CHECK(&simd::kernels() == &simd::kernelsFor(simd::Backend::Scalar));
  if (!simd::backendAvailable(simd::Backend::Avx2)) {
    CHECK_THROWS_AS(simd::setBackend(simd::Backend::Avx2), ConfigError);
  } else {
    simd::setBackend(simd::Backend::Avx2);
    CHECK(simd::activeBackend() == simd::Backend::Avx2);
  }
}
