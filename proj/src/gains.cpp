#include "rdpq/gains.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <span>

#include "rdpq/errors.hpp"
#include "rdpq/simd.hpp"

namespace rdpq {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPi2 = kPi * kPi;
const double kInvSqrt3 = 1.0 / std::sqrt(3.0);
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double trapezoidL2(std::span<const double> f, double h, std::size_t count) {
  if (count < 2) return 0.0;
  double s = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const double w = (j == 0 || j + 1 == count) ? 0.5 : 1.0;
    s += w * f[j] * f[j];
  }
  return s * h;
}

// Double integral of f^2 over the triangle y <= x from a lower-triangular table.
double triangleL2(const DenseMatrix& table, const Grid& grid) {
  const double h = grid.spacing();
  const auto outer = grid.trapezoidWeights();
  double s = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) s += outer[i] * trapezoidL2(table.row(i), h, i + 1);
  return std::sqrt(s);
}

double maxRowL2(const DenseMatrix& table, const Grid& grid) {
  double best = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    best = std::max(best, std::sqrt(simd::weightedSumSquares(grid.trapezoidWeights(), table.row(i))));
  }
  return best;
}

// int_0^1 |F(s)| ds. F has components decaying on scales down to 1/(D N^2 pi^2),
// so Simpson runs on decade-graded segments.
double absFluxIntegral(const SineSeriesKernel& series) {
  constexpr std::size_t kPanels = 2000;
  std::vector<double> edges{0.0};
  for (int e = -8; e <= 0; ++e) edges.push_back(std::pow(10.0, e));
  double total = 0.0;
  for (std::size_t seg = 0; seg + 1 < edges.size(); ++seg) {
    const double a = edges[seg];
    const double h = (edges[seg + 1] - a) / kPanels;
    double s = std::fabs(series.flux(a)) + std::fabs(series.flux(edges[seg + 1]));
    for (std::size_t k = 1; k < kPanels; ++k) {
      s += (k % 2 == 1 ? 4.0 : 2.0) * std::fabs(series.flux(a + static_cast<double>(k) * h));
    }
    total += s * h / 3.0;
  }
  return total;
}

double m3For(const KernelTables& tables) {
  const auto& grid = tables.grid;
  const double gammaNorm = std::sqrt(simd::weightedSumSquares(grid.trapezoidWeights(), tables.gamma1));
  return gammaNorm + tables.plantParams.delay * simd::maxAbs(tables.g1);
}

void pushF(std::string& out, const char* fmt, const std::string& name, double value) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, name.c_str(), value);
  out += buf;
}

}  // namespace

void QuantizerBudget::validate() const {
  if (!(range > 0.0)) throw ParameterError("quantizer range M must be positive");
  if (!(error >= 0.0 && error < range)) throw ParameterError("quantizer error bound must satisfy 0 <= Delta < M");
  if (!(deadzone >= 0.0 && deadzone < range)) throw ParameterError("deadzone must satisfy 0 <= M-hat < M");
}

DesignConstants::DesignConstants() : omega(kNaN), dwell(kNaN), overallRate(kNaN) {}

TildeConstants computeTildeConstants(const KernelTables& tables) {
  const auto& grid = tables.grid;
  const double d = tables.plantParams.delay;
  TildeConstants t;
  t.k = 1.0 + triangleL2(tables.kGrid, grid);
  t.l = 1.0 + triangleL2(tables.lGrid, grid);
  t.g = 1.0 + d * absFluxIntegral(tables.forward);
  t.p = 1.0 + d * absFluxIntegral(tables.inverse);
  t.gamma = maxRowL2(tables.gammaGrid, grid);
  t.delta = maxRowL2(tables.deltaGrid, grid);
  return t;
}

Equivalence computeEquivalence(const TildeConstants& t) {
  return {std::max(t.k + t.gamma, t.g), 1.0 / std::max(t.l + t.delta, t.p)};
}

SpectralConstants computeSpectralConstants(const PlantParams& params, std::size_t terms) {
  params.checkSeries(terms);
  if (terms == 0) throw ParameterError("series G needs at least one term");
  const double lambda = params.lambda;
  double sum = 0.0;
  for (std::size_t n = terms; n >= 1; --n) {  // smallest terms first
    const double a = static_cast<double>(n) * static_cast<double>(n) * kPi2;
    sum += a / ((lambda - a) * (lambda - a));
  }
  // For n > terms: a/(lambda - a)^2 <= (1/a) / (1 - lambda/a)^2, and
  // sum_{n>N} 1/(n^2 pi^2) <= 1/(pi^2 N).
  const double aNext = static_cast<double>(terms + 1) * static_cast<double>(terms + 1) * kPi2;
  double tail = std::numeric_limits<double>::infinity();
  if (aNext > lambda) {
    const double r = 1.0 - lambda / aNext;
    tail = 1.0 / (kPi2 * static_cast<double>(terms) * r * r);
  }
  SpectralConstants s;
  s.sigma1 = lambda - kPi2;
  s.seriesG = 4.0 * std::sqrt(sum);
  s.seriesGUncertainty = 4.0 * std::sqrt(sum + tail) - s.seriesG;
  s.overshoot = std::max(std::sqrt(2.0), s.seriesG + 1.0);
  return s;
}

bool smallGainHolds(const PlantParams& params, double lambda1) {
  return 1.0 / (1.0 + lambda1) < std::exp(-params.delay) / (1.0 + kInvSqrt3);
}

double selectLambda1(const PlantParams& params, double margin) {
  if (!(margin >= 0.0 && margin < 1.0)) throw ParameterError("small-gain margin must lie in [0, 1)");
  const double target = (1.0 - margin) * std::exp(-params.delay) / (1.0 + kInvSqrt3);
  double l1 = std::max(0.0, 1.0 / target - 1.0);
  while (1.0 / (1.0 + l1) > target) l1 = std::nextafter(l1, std::numeric_limits<double>::infinity());
  return l1;
}

Auxiliaries evaluateAuxiliaries(const PlantParams& params, double lambda1, double epsilon, double nu, double delta) {
  if (!(epsilon > 0.0 && nu > 0.0)) throw ParameterError("epsilon and nu must be positive");
  if (!(delta > 0.0 && delta < std::min(kPi2, nu))) throw ParameterError("delta must lie in (0, min{pi^2, nu})");
  Auxiliaries a;
  a.epsilon = epsilon;
  a.nu = nu;
  a.delta = delta;
  const double grow = std::exp(params.delay * (nu + 1.0));
  a.phi = (1.0 + epsilon) / (1.0 + lambda1) * grow;
  if (!(a.phi < 1.0)) {
    a.phi1 = a.m0 = kNaN;
    return a;
  }
  a.phi1 = kInvSqrt3 * (1.0 + epsilon) * a.phi / (1.0 - a.phi);
  if (!(a.phi1 < 1.0)) {
    a.m0 = kNaN;
    return a;
  }
  a.m0 = std::max(1.0, kInvSqrt3 * (1.0 + epsilon) * grow / (1.0 - a.phi)) / (1.0 - a.phi1) +
         std::max(grow, a.phi) / ((1.0 - a.phi) * (1.0 - a.phi1));
  return a;
}

Auxiliaries selectAuxiliaries(const PlantParams& params, double lambda1) {
  for (int e = 1; e <= 8; ++e) {
    const double v = std::pow(10.0, -e);
    const auto a = evaluateAuxiliaries(params, lambda1, v, v, 0.5 * std::min(kPi2, v));
    if (a.phi < 1.0 && a.phi1 < 1.0) return a;
  }
  throw InfeasibleError("no epsilon = nu >= 1e-8 gives phi < 1 and phi1 < 1; lambda_1 = " + std::to_string(lambda1) +
                        " is too small");
}

double computeM3(const KernelTables& tables) { return m3For(tables); }

DesignConstants computeDesignConstants(const KernelTables& tables, const DesignTuning& tuning) {
  const auto& params = tables.plantParams;
  params.checkUnstable();

  DesignConstants c;
  c.plant = params;
  c.modeCount = tables.truncation.modeCount;
  c.tilde = computeTildeConstants(tables);
  const auto eq = computeEquivalence(c.tilde);
  c.m1 = eq.m1;
  c.m2 = eq.m2;
  c.m3 = m3For(tables);

  // Refinement probe: same grid, twice the modes.
  SeriesTruncation refined = tables.truncation;
  refined.modeCount *= 2;
  refined.quadraturePoints = std::max(refined.quadraturePoints, 20 * refined.modeCount + 1);
  const auto finer = buildTables(tables.grid, params, refined);
  c.m3Refined = m3For(finer);
  c.m3Converged = std::fabs(c.m3Refined - c.m3) <= tables.truncation.tailTolerance * std::fabs(c.m3);

  c.spectral = computeSpectralConstants(params);
  c.lambda1 = tuning.lambda1 ? *tuning.lambda1 : selectLambda1(params, tuning.margin);
  if (!smallGainHolds(params, c.lambda1)) {
    throw InfeasibleError("lambda_1 = " + std::to_string(c.lambda1) + " violates the small-gain condition");
  }
  if (tuning.epsilon || tuning.nu || tuning.delta) {
    const auto base = selectAuxiliaries(params, c.lambda1);
    const double eps = tuning.epsilon.value_or(base.epsilon);
    const double nu = tuning.nu.value_or(base.nu);
    const double delta = tuning.delta.value_or(0.5 * std::min(kPi2, nu));
    c.aux = evaluateAuxiliaries(params, c.lambda1, eps, nu, delta);
    if (!(c.aux.phi < 1.0 && c.aux.phi1 < 1.0)) {
      throw InfeasibleError("overridden epsilon/nu give phi = " + std::to_string(c.aux.phi) +
                            ", phi1 = " + std::to_string(c.aux.phi1) + " (both must be < 1)");
    }
  } else {
    c.aux = selectAuxiliaries(params, c.lambda1);
  }
  c.mBar = c.m2 / (c.m1 * (1.0 + c.aux.m0));
  return c;
}

OmegaT computeOmegaT(const DesignConstants& c, const QuantizerBudget& budget) {
  const double m0 = c.aux.m0;
  const double omega = (1.0 + c.lambda1) * (1.0 + m0) * (1.0 + m0) * budget.error * c.m3 / (c.m2 * budget.range);
  if (!(omega < 1.0 + m0)) {
    throw InfeasibleError("Omega = " + std::to_string(omega) + " >= 1 + M0 = " + std::to_string(1.0 + m0) +
                          "; dwell time would be non-positive");
  }
  if (omega == 0.0) return {0.0, std::numeric_limits<double>::infinity(), -c.aux.delta};
  const double dwell = -std::log(omega / (1.0 + m0)) / c.aux.delta;
  return {omega, dwell, std::log(omega) / dwell};
}

DesignConstants withBudget(DesignConstants c, const QuantizerBudget& budget) {
  const auto o = computeOmegaT(c, budget);
  c.omega = o.omega;
  c.dwell = o.dwell;
  c.overallRate = o.overallRate;
  return c;
}

double budgetRatioBound(const DesignConstants& c, QuantMode mode) {
  const double m0 = c.aux.m0;
  if (mode == QuantMode::State) {
    return c.m2 / ((1.0 + m0) * std::max(c.m3 * (1.0 + c.lambda1) * (1.0 + m0), 2.0 * c.m1));
  }
  return c.m2 / (c.m3 * (1.0 + c.lambda1) * (1.0 + m0) * (1.0 + m0));
}

BudgetCertificate validateBudget(const QuantizerBudget& budget, const DesignConstants& c, QuantMode mode) {
  BudgetCertificate cert;
  cert.mode = mode;
  cert.bound = budgetRatioBound(c, mode);
  const char* label = mode == QuantMode::State ? "state" : "input";
  try {
    budget.validate();
  } catch (const ParameterError& e) {
    cert.ratio = budget.range > 0.0 ? budget.error / budget.range : std::numeric_limits<double>::infinity();
    cert.message = std::string(label) + " budget rejected: " + e.what();
    return cert;
  }
  cert.ratio = budget.error / budget.range;
  cert.passed = cert.ratio < cert.bound;
  char buf[256];
  if (cert.passed) {
    const auto o = computeOmegaT(c, budget);
    cert.omega = o.omega;
    cert.dwell = o.dwell;
    cert.overallRate = o.overallRate;
    std::snprintf(buf, sizeof buf, "%s budget PASS: Delta/M = %.6g < %.6g; Omega = %.6g, T = %.6g, rate = %.6g", label,
                  cert.ratio, cert.bound, cert.omega, cert.dwell, cert.overallRate);
  } else {
    std::snprintf(buf, sizeof buf, "%s budget FAIL: Delta/M = %.6g is not below %.6g", label, cert.ratio, cert.bound);
  }
  cert.message = buf;
  return cert;
}

double theoremGamma(const DesignConstants& c, const QuantizerBudget& budget, double tau, double mu0, QuantMode mode) {
  if (std::isnan(c.omega)) throw ConfigError("theoremGamma needs budget-dependent constants (withBudget)");
  if (!(mu0 > 0.0 && tau > 0.0)) throw ParameterError("tau and mu0 must be positive");
  const double sigma1 = c.spectral.sigma1;
  const double expo = 1.0 - c.overallRate / sigma1;
  const double M = budget.range;
  const double zoom = std::exp(2.0 * sigma1 * tau) * mu0;
  if (mode == QuantMode::State) {
    const double gap = M * c.mBar - 2.0 * budget.error;
    if (!(gap > 0.0)) throw InfeasibleError("M * M-bar <= 2 Delta; the detection set is empty");
    const double a = 1.0 / (mu0 * gap);
    return c.spectral.overshoot / c.m2 * std::max(c.m2 * M * zoom / c.omega, c.m1) * std::max(a, 1.0) *
           std::pow(a, expo);
  }
  const double b = c.m3 / (mu0 * M * c.mBar);
  return sigma1 / c.m2 * std::max(c.m2 * M * zoom / (c.omega * c.m3), c.m1) * std::max(b, 1.0) * std::pow(b, expo);
}

std::vector<std::pair<std::string, double>> constantsLedger(const DesignConstants& c) {
  return {
      {"lambda", c.plant.lambda},
      {"D", c.plant.delay},
      {"modes", static_cast<double>(c.modeCount)},
      {"k_tilde", c.tilde.k},
      {"l_tilde", c.tilde.l},
      {"g_tilde", c.tilde.g},
      {"p_tilde", c.tilde.p},
      {"gamma_tilde", c.tilde.gamma},
      {"delta_tilde", c.tilde.delta},
      {"M1", c.m1},
      {"M2", c.m2},
      {"M3", c.m3},
      {"M3_2N", c.m3Refined},
      {"M3_converged", c.m3Converged ? 1.0 : 0.0},
      {"M_bar", c.mBar},
      {"sigma1", c.spectral.sigma1},
      {"G", c.spectral.seriesG},
      {"G_uncertainty", c.spectral.seriesGUncertainty},
      {"M_bar1", c.spectral.overshoot},
      {"lambda1", c.lambda1},
      {"epsilon", c.aux.epsilon},
      {"nu", c.aux.nu},
      {"phi", c.aux.phi},
      {"phi1", c.aux.phi1},
      {"M0", c.aux.m0},
      {"delta", c.aux.delta},
      {"Omega", c.omega},
      {"T", c.dwell},
      {"overall_rate", c.overallRate},
  };
}

std::string formatLedger(const DesignConstants& c) {
  std::string out;
  for (const auto& [name, value] : constantsLedger(c)) pushF(out, "%-14s %.10g\n", name, value);
  return out;
}

std::string formatFlat(const DesignConstants& c) {
  std::string out;
  for (const auto& [name, value] : constantsLedger(c)) pushF(out, "%s=%.17g\n", name, value);
  return out;
}

}  // namespace rdpq
