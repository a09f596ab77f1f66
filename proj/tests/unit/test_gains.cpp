#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "rdpq/errors.hpp"
#include "rdpq/gains.hpp"

using namespace rdpq;
using std::numbers::pi;

namespace {

const PlantParams kRef{11.0, 0.1};

const KernelTables& refTables() {
  static const KernelTables t = buildTables(Grid(200), kRef, SeriesTruncation{});
  return t;
}

const DesignConstants& refConstants() {
  static const DesignConstants c = computeDesignConstants(refTables());
  return c;
}

const QuantizerBudget kRefBudget{1.0, 1.9e-6, 4.75e-7};

}  // namespace

TEST_CASE("tilde constants of vanishing kernels are one") {
  const auto t = computeTildeConstants(buildTables(Grid(100), PlantParams{1e-14, 0.1}, SeriesTruncation{}));
  CHECK(t.k == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.l == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.g == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.p == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.gamma == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(t.delta == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("k-tilde and l-tilde against a fine quadrature of the closed-form kernels") {
  // Simpson in x, Simpson in y on [0, x], 2000 panels each.
  auto oracle = [](double (*f)(double, double, double)) {
    const std::size_t n = 2000;
    const double hx = 1.0 / n;
    double outer = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      const double x = static_cast<double>(i) * hx;
      double inner = 0.0;
      if (i > 0) {
        const double hy = x / n;
        for (std::size_t j = 0; j <= n; ++j) {
          const double y = std::min(x, static_cast<double>(j) * hy);
          const double w = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
          inner += w * f(x, y, 11.0) * f(x, y, 11.0);
        }
        inner *= hy / 3.0;
      }
      outer += ((i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0)) * inner;
    }
    return 1.0 + std::sqrt(outer * hx / 3.0);
  };
  const auto& t = refConstants().tilde;
  CHECK(t.k == doctest::Approx(oracle(kernelK)).epsilon(1e-3));
  CHECK(t.l == doctest::Approx(oracle(kernelL)).epsilon(1e-3));
}

TEST_CASE("g-tilde and p-tilde against a uniform fine quadrature of the flux") {
  const auto& tables = refTables();
  auto oracle = [&](const std::vector<double>& c, double reaction) {
    const std::size_t panels = 1'000'000;
    const double h = 1.0 / panels;
    double s = 0.0;
    for (std::size_t k = 0; k <= panels; ++k) {
      const double x = static_cast<double>(k) * h;
      double f = 0.0;
      for (std::size_t n = 1; n <= c.size(); ++n) {
        const double nn = static_cast<double>(n);
        f += -2.0 * nn * pi * (n % 2 ? -1.0 : 1.0) * c[n - 1] * std::exp(0.1 * (reaction - nn * nn * pi * pi) * x);
      }
      s += ((k == 0 || k == panels) ? 1.0 : (k % 2 ? 4.0 : 2.0)) * std::abs(f);
    }
    return 1.0 + 0.1 * s * h / 3.0;
  };
  const auto& t = refConstants().tilde;
  CHECK(t.g == doctest::Approx(oracle(tables.sineCoeffsK, 11.0)).epsilon(1e-4));
  CHECK(t.p == doctest::Approx(oracle(tables.sineCoeffsL, 0.0)).epsilon(1e-4));
}

TEST_CASE("gamma-tilde is the largest row norm of gamma") {
  const auto& tables = refTables();
  const auto w = tables.grid.trapezoidWeights();
  double best = 0.0;
  for (std::size_t i = 0; i < tables.grid.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < tables.grid.size(); ++j) s += w[j] * tables.gammaGrid(i, j) * tables.gammaGrid(i, j);
    best = std::max(best, std::sqrt(s));
  }
  CHECK(refConstants().tilde.gamma == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("norm equivalence constants") {
  const auto e = computeEquivalence(TildeConstants{1, 1, 1, 1, 1, 1});
  CHECK(e.m1 == 2.0);
  CHECK(e.m2 == 0.5);
  const auto& c = refConstants();
  CHECK(c.m1 == std::max(c.tilde.k + c.tilde.gamma, c.tilde.g));
  CHECK(c.m2 == doctest::Approx(1.0 / std::max(c.tilde.l + c.tilde.delta, c.tilde.p)));
  CHECK(c.m2 < 1.0);
  CHECK(c.m1 > 1.0);
  CHECK(c.mBar == doctest::Approx(c.m2 / (c.m1 * (1.0 + c.aux.m0))));
}

TEST_CASE("spectral constants") {
  const auto s = computeSpectralConstants(kRef);
  CHECK(s.sigma1 == doctest::Approx(11.0 - pi * pi).epsilon(1e-15));
  CHECK(std::abs(s.sigma1 - 1.13041) <= 1e-4);
  CHECK(std::abs(s.seriesG - 11.18) <= 0.01);
  // Independent partial sum to 1e6 terms.
  double sum = 0.0;
  for (std::size_t n = 1'000'000; n >= 1; --n) {
    const double a = static_cast<double>(n) * static_cast<double>(n) * pi * pi;
    sum += a / ((11.0 - a) * (11.0 - a));
  }
  CHECK(std::abs(s.seriesG - 4.0 * std::sqrt(sum)) <= 1e-5);
  CHECK(s.seriesGUncertainty > 0.0);
  CHECK(s.seriesGUncertainty < 1e-6);
  CHECK(s.overshoot == doctest::Approx(s.seriesG + 1.0));
  CHECK_THROWS_AS(computeSpectralConstants(PlantParams{pi * pi, 0.1}), ParameterError);
}

TEST_CASE("small-gain selection") {
  const double closed = (1.0 + std::sqrt(3.0) / 3.0) * std::exp(0.1) - 1.0;
  const double l1 = selectLambda1(kRef, 0.0);
  CHECK(l1 >= closed);
  CHECK(l1 == doctest::Approx(closed).epsilon(1e-14));
  CHECK(std::abs(closed - 0.743) <= 1e-3);
  CHECK(selectLambda1(PlantParams{11.0, 1e-12}, 0.0) == doctest::Approx(std::sqrt(3.0) / 3.0).epsilon(1e-9));
  for (double margin : {0.0, 0.1, 0.5}) {
    const double v = selectLambda1(kRef, margin);
    CHECK(1.0 / (1.0 + v) <= (1.0 - margin) * std::exp(-0.1) / (1.0 + std::sqrt(3.0) / 3.0));
  }
  CHECK(smallGainHolds(kRef, selectLambda1(kRef, 0.1)));
  CHECK_FALSE(smallGainHolds(kRef, 0.5));
}

TEST_CASE("auxiliary constants") {
  const auto a = evaluateAuxiliaries(kRef, 1.0, 0.1, 0.1, 0.05);
  CHECK(std::abs(a.phi - 0.55 * std::exp(0.11)) <= 1e-12);
  CHECK(std::abs(a.phi - 0.6139) <= 1e-4);
  CHECK(std::abs(a.phi1 - 1.010) <= 1e-3);

  const auto s = selectAuxiliaries(kRef, 1.0);
  CHECK(s.epsilon < 0.1);
  CHECK(s.phi < 1.0);
  CHECK(s.phi1 < 1.0);
  CHECK(s.epsilon == s.nu);
  CHECK(s.delta == 0.5 * std::min(pi * pi, s.nu));
  CHECK(s.m0 > 1.0);

  CHECK_THROWS_AS(selectAuxiliaries(kRef, 0.1), InfeasibleError);
  CHECK_THROWS_AS(evaluateAuxiliaries(kRef, 1.0, 0.1, 0.1, 0.2), ParameterError);
}

TEST_CASE("Omega and dwell time") {
  const auto& c = refConstants();
  const auto tiny = computeOmegaT(c, QuantizerBudget{1.0, 1e-300, 0.0});
  CHECK(tiny.omega < 1e-290);
  CHECK(tiny.dwell > 1e4);
  const auto zero = computeOmegaT(c, QuantizerBudget{1.0, 0.0, 0.0});
  CHECK(zero.omega == 0.0);
  CHECK(std::isinf(zero.dwell));
  CHECK(zero.overallRate == -c.aux.delta);
  // The rate tends to -delta as Delta -> 0.
  CHECK(computeOmegaT(c, QuantizerBudget{1.0, 1e-200, 0.0}).overallRate ==
        doctest::Approx(-c.aux.delta).epsilon(0.01));

  const auto a = computeOmegaT(c, QuantizerBudget{1.0, 1e-6, 0.0});
  const auto b = computeOmegaT(c, QuantizerBudget{2.0, 2e-6, 0.0});
  CHECK(a.omega == doctest::Approx(b.omega).epsilon(1e-15));

  // At Delta/M = M2 / ((1+M0)^2 M3 (1+lambda1)) the Omega formula collapses to one.
  const double m0 = c.aux.m0;
  const double ratio = c.m2 / ((1.0 + m0) * (1.0 + m0) * c.m3 * (1.0 + c.lambda1));
  const auto edge = computeOmegaT(c, QuantizerBudget{1.0, ratio, 0.0});
  CHECK(edge.omega == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(edge.dwell == doctest::Approx(std::log(1.0 + m0) / c.aux.delta).epsilon(1e-12));
  CHECK(std::abs(edge.overallRate) <= 1e-12);

  CHECK_THROWS_AS(computeOmegaT(c, QuantizerBudget{1.0, ratio * (1.0 + m0) * 1.01, 0.0}), InfeasibleError);
}

TEST_CASE("budget certificates") {
  const auto& c = refConstants();
  for (const auto mode : {QuantMode::State, QuantMode::Input}) {
    CHECK(validateBudget(QuantizerBudget{1.0, 0.0, 0.0}, c, mode).passed);
    const double bound = budgetRatioBound(c, mode);
    CHECK_FALSE(validateBudget(QuantizerBudget{1.0, bound, 0.0}, c, mode).passed);
    CHECK_FALSE(validateBudget(QuantizerBudget{2.0, 2.0 * bound, 0.0}, c, mode).passed);
    const auto cert = validateBudget(kRefBudget, c, mode);
    CHECK(cert.passed);
    CHECK(cert.omega < 1.0);
    CHECK(cert.dwell > 0.0);
    CHECK(cert.overallRate < 0.0);
    CHECK(cert.ratio == doctest::Approx(1.9e-6));
    CHECK_FALSE(cert.message.empty());
  }
  CHECK_FALSE(validateBudget(QuantizerBudget{-1.0, 0.0, 0.0}, c, QuantMode::State).passed);
}

TEST_CASE("theorem coefficient: double-entry re-evaluation") {
  const auto c = withBudget(refConstants(), kRefBudget);
  const double tau = 0.1, mu0 = 1.0;
  const double s1 = c.spectral.sigma1;
  const double r = std::log(c.omega) / c.dwell;
  CHECK(c.overallRate == doctest::Approx(r).epsilon(1e-14));

  // State mode, written out term by term.
  const double gap = 1.0 * c.mBar - 2.0 * 1.9e-6;
  const double lead = c.spectral.overshoot / c.m2;
  const double growth = c.m2 * 1.0 * std::exp(2.0 * s1 * tau) * mu0 / c.omega;
  const double inv = 1.0 / (mu0 * gap);
  const double expected = lead * std::max(growth, c.m1) * std::max(inv, 1.0) * std::exp((1.0 - r / s1) * std::log(inv));
  CHECK(theoremGamma(c, kRefBudget, tau, mu0, QuantMode::State) == doctest::Approx(expected).epsilon(1e-12));

  // Input mode.
  const double b = c.m3 / (mu0 * 1.0 * c.mBar);
  const double expectedIn = s1 / c.m2 * std::max(growth / c.m3, c.m1) * std::max(b, 1.0) * std::exp((1.0 - r / s1) * std::log(b));
  CHECK(theoremGamma(c, kRefBudget, tau, mu0, QuantMode::Input) == doctest::Approx(expectedIn).epsilon(1e-12));

  for (const auto mode : {QuantMode::State, QuantMode::Input}) {
    CHECK(theoremGamma(c, kRefBudget, tau, mu0, mode) > 0.0);
    // Larger 1/mu0 gives a larger coefficient.
    CHECK(theoremGamma(c, kRefBudget, tau, 0.5, mode) > theoremGamma(c, kRefBudget, tau, 1.0, mode));
  }
  CHECK_THROWS_AS(theoremGamma(refConstants(), kRefBudget, tau, mu0, QuantMode::State), ConfigError);
}

TEST_CASE("design constants honour overrides and report M3 convergence") {
  const auto& c = refConstants();
  CHECK(c.m3 > 0.0);
  CHECK(c.m3Refined > 0.0);
  CHECK(c.m3Converged == (std::abs(c.m3Refined - c.m3) <= 1e-2 * c.m3));
  CHECK(c.m3 == computeM3(refTables()));
  CHECK(std::isnan(c.omega));

  DesignTuning tuning;
  tuning.lambda1 = 1.5;
  tuning.epsilon = 1e-3;
  tuning.nu = 1e-3;
  tuning.delta = 1e-4;
  const auto o = computeDesignConstants(refTables(), tuning);
  CHECK(o.lambda1 == 1.5);
  CHECK(o.aux.epsilon == 1e-3);
  CHECK(o.aux.delta == 1e-4);

  DesignTuning bad;
  bad.lambda1 = 0.1;
  CHECK_THROWS_AS(computeDesignConstants(refTables(), bad), InfeasibleError);

  CHECK_THROWS_AS(computeDesignConstants(buildTables(Grid(50), PlantParams{5.0, 0.1}, SeriesTruncation{})),
                  ParameterError);
}

TEST_CASE("ledger formats") {
  const auto c = withBudget(refConstants(), kRefBudget);
  const auto flat = formatFlat(c);
  CHECK(flat.find("M1=") != std::string::npos);
  CHECK(flat.find("sigma1=") != std::string::npos);
  CHECK(formatLedger(c).find("M3_2N") != std::string::npos);
  for (const auto& [name, value] : constantsLedger(c)) {
    CAPTURE(name);
    CHECK(std::isfinite(value));
  }
}
