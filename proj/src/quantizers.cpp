#include "rdpq/quantizers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

#include "rdpq/errors.hpp"
#include "rdpq/simd.hpp"

namespace rdpq {
namespace {

// Relative slack for floating-point rounding in the property checks.
constexpr double kRoundoff = 1e-12;

void requirePositiveZoom(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("zoom variable mu must be positive and finite");
}

void record(RegimeStats& s, double margin, const std::string& what) {
  if (s.draws == 0 || margin < s.worstMargin) s.worstMargin = margin;
  ++s.draws;
  if (margin < 0.0) {
    if (s.violations == 0) s.firstViolation = what;
    ++s.violations;
  }
}

std::string describe(const char* name, const RegimeStats& s) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-24s draws=%zu violations=%zu worst_margin=%.6g%s%s\n", name, s.draws, s.violations,
                s.worstMargin + 0.0, s.violations ? " first: " : "", s.firstViolation.c_str());
  return buf;
}

}  // namespace

QuantizerSpec QuantizerSpec::fromBudget(const QuantizerBudget& budget, double saturationFactor) {
  budget.validate();
  if (!(budget.deadzone < budget.error)) throw ParameterError("quantizer needs M-hat < Delta");
  QuantizerSpec s;
  s.range = budget.range;
  s.error = budget.error;
  s.deadzone = budget.deadzone;
  s.saturationFactor = saturationFactor;
  s.step = 0.5 * (budget.error - budget.deadzone);
  s.validate();
  return s;
}

void QuantizerSpec::validate() const {
  if (!(step > 0.0)) throw ParameterError("quantizer step must be positive");
  if (!(range > 0.0)) throw ParameterError("quantizer range M must be positive");
  if (!(error < range)) throw ParameterError("quantizer needs Delta < M");
  if (!(deadzone >= 0.0 && deadzone < range)) throw ParameterError("quantizer needs 0 <= M-hat < M");
  if (!(deadzone + 2.0 * step <= error * (1.0 + kRoundoff))) {
    throw ParameterError("quantizer needs M-hat + 2 step <= Delta");
  }
  if (!(saturationFactor >= 1.0)) throw ParameterError("saturation factor must be at least 1");
}

double QuantizerSpec::maxLevel() const { return std::floor(saturationFactor * range / step); }

double quantizeScalar(double x, const QuantizerSpec& spec) {
  double out;
  simd::kernelsFor(simd::Backend::Scalar).zoomQuantize(&x, &out, 1, 1.0, spec.step, spec.maxLevel());
  return out;
}

Field quantizeField(const Field& f, const QuantizerSpec& spec) {
  std::vector<double> out(f.size());
  simd::zoomQuantize(f.samples(), out, 1.0, spec.step, spec.maxLevel());
  return Field(f.grid(), std::move(out), f.role());
}

bool zoomQuantizeSamples(const Grid& grid, std::span<const double> u, std::span<const double> v, double mu,
                         const QuantizerSpec& spec, std::span<double> qu, std::span<double> qv) {
  requirePositiveZoom(mu);
  const double maxLevel = spec.maxLevel();
  // Unscaled pass first: the deadzone decision is taken on q(u/mu), q(v/mu).
  simd::zoomQuantize(u, qu, mu, spec.step, maxLevel);
  simd::zoomQuantize(v, qv, mu, spec.step, maxLevel);
  const double norm = (l2Norm(grid, qu) + supNorm(qv)) / mu;
  if (norm <= spec.pairThreshold()) {
    std::fill(qu.begin(), qu.end(), 0.0);
    std::fill(qv.begin(), qv.end(), 0.0);
    return true;
  }
  return false;
}

CascadePair zoomQuantizePair(const CascadePair& pair, double mu, const QuantizerSpec& spec) {
  requirePositiveZoom(mu);
  const auto& grid = pair.u.grid();
  std::vector<double> qu(grid.size()), qv(grid.size());
  zoomQuantizeSamples(grid, pair.u.samples(), pair.v.samples(), mu, spec, qu, qv);
  return CascadePair::fromSamples(grid, std::move(qu), std::move(qv));
}

double inputQuantize(double value, double mu, const QuantizerSpec& spec) {
  requirePositiveZoom(mu);
  const double q = quantizeScalar(value / mu, spec);
  if (std::fabs(q) <= spec.scalarThreshold()) return 0.0;
  return q * mu;
}

bool PropertyReport::passed() const {
  for (const auto* s : {&pairDeadzone, &pairInRange, &pairOutOfRange, &scalarDeadzone, &scalarInRange,
                        &scalarOutOfRange}) {
    if (s->violations != 0 || s->draws == 0) return false;
  }
  return true;
}

std::string PropertyReport::text() const {
  return describe("deadzone pair <= M-hat", pairDeadzone) + describe("error pair <= M", pairInRange) +
         describe("range pair > M", pairOutOfRange) + describe("deadzone input <= M-hat", scalarDeadzone) +
         describe("error input <= M", scalarInRange) + describe("range input > M", scalarOutOfRange);
}

std::string PropertyReport::summaryLine() const {
  std::size_t draws = 0, violations = 0;
  for (const auto* s : {&pairDeadzone, &pairInRange, &pairOutOfRange, &scalarDeadzone, &scalarInRange,
                        &scalarOutOfRange}) {
    draws += s->draws;
    violations += s->violations;
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "quantizer_properties status=%s draws=%zu violations=%zu", passed() ? "pass" : "fail",
                draws, violations);
  return buf;
}

PropertyReport verifyProperties(const QuantizerSpec& spec, std::size_t sampleCount, std::uint64_t seed,
                                const Grid& grid) {
  if (sampleCount < 1000) throw ParameterError("verifyProperties needs at least 1000 draws per regime");
  spec.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  constexpr int kModes = 6;
  const double M = spec.range, D = spec.error, Mh = spec.deadzone;
  const double cM = spec.saturationFactor * M;
  const std::size_t n = grid.size();

  auto randomZoom = [&] { return std::pow(10.0, 6.0 * unit(rng) - 3.0); };
  // Norm target in (lo, hi], drawn uniformly.
  auto target = [&](double lo, double hi) { return hi - (hi - lo) * unit(rng); };

  std::vector<double> u(n), v(n), qu(n), qv(n), eu(n), ev(n);
  auto shape = [&] {
    for (auto* f : {&u, &v}) std::fill(f->begin(), f->end(), 0.0);
    const double offset = sym(rng);
    for (int k = 1; k <= kModes; ++k) {
      const double a = sym(rng) / k, b = sym(rng) / k, phase = std::numbers::pi * unit(rng);
      for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.node(i);
        u[i] += a * std::sin(k * std::numbers::pi * x);
        v[i] += b * std::sin(k * std::numbers::pi * x + phase);
      }
    }
    for (auto& s : v) s += offset;
    // Random split of the joint norm between the components.
    const double split = unit(rng);
    const double nu = l2Norm(grid, u), nv = supNorm(v);
    for (auto& s : u) s *= nu > 0.0 ? split / nu : 0.0;
    for (auto& s : v) s *= nv > 0.0 ? (1.0 - split) / nv : 0.0;
  };

  PropertyReport rep;
  for (int regime = 0; regime < 3; ++regime) {
    auto& stats = regime == 0 ? rep.pairDeadzone : regime == 1 ? rep.pairInRange : rep.pairOutOfRange;
    std::size_t done = 0;
    while (done < sampleCount) {
      shape();
      const double mu = randomZoom();
      const double norm = regime == 0 ? target(0.0, Mh) : regime == 1 ? target(Mh, M) : target(M, cM);
      const double scale = norm * mu;
      for (auto& s : u) s *= scale;
      for (auto& s : v) s *= scale;
      // Stay inside the per-sample saturation envelope.
      if (supNorm(u) > cM * mu || supNorm(v) > cM * mu) continue;
      ++done;
      const double inNorm = l2Norm(grid, u) + supNorm(v);
      zoomQuantizeSamples(grid, u, v, mu, spec, qu, qv);
      const double outNorm = l2Norm(grid, qu) + supNorm(qv);
      char what[160];
      if (regime == 0) {
        std::snprintf(what, sizeof what, "norm=%.6g mu=%.6g output_norm=%.6g", inNorm / mu, mu, outNorm);
        record(stats, inNorm > Mh * mu ? 0.0 : -outNorm, what);
      } else if (regime == 1) {
        for (std::size_t i = 0; i < n; ++i) {
          eu[i] = qu[i] - u[i];
          ev[i] = qv[i] - v[i];
        }
        const double err = l2Norm(grid, eu) + supNorm(ev);
        std::snprintf(what, sizeof what, "norm=%.6g mu=%.6g error=%.6g", inNorm / mu, mu, err / mu);
        record(stats, (D * (1.0 + kRoundoff) - err / mu), what);
      } else {
        std::snprintf(what, sizeof what, "norm=%.6g mu=%.6g output_norm=%.6g", inNorm / mu, mu, outNorm / mu);
        record(stats, inNorm <= M * mu ? 0.0 : outNorm / mu - (M - D) * (1.0 + kRoundoff), what);
      }
    }
  }

  for (int regime = 0; regime < 3; ++regime) {
    auto& stats = regime == 0 ? rep.scalarDeadzone : regime == 1 ? rep.scalarInRange : rep.scalarOutOfRange;
    for (std::size_t k = 0; k < sampleCount; ++k) {
      const double mu = randomZoom();
      const double mag = regime == 0 ? target(0.0, Mh) : regime == 1 ? target(Mh, M) : target(M, cM);
      const double x = (unit(rng) < 0.5 ? -mag : mag) * mu;
      const double q = inputQuantize(x, mu, spec);
      char what[160];
      std::snprintf(what, sizeof what, "value=%.6g mu=%.6g output=%.6g", x / mu, mu, q / mu);
      if (regime == 0) {
        record(stats, std::fabs(x) > Mh * mu ? 0.0 : -std::fabs(q), what);
      } else if (regime == 1) {
        record(stats, D * (1.0 + kRoundoff) - std::fabs(q - x) / mu, what);
      } else {
        record(stats, std::fabs(x) <= M * mu ? 0.0 : std::fabs(q) / mu - (M - D) * (1.0 + kRoundoff), what);
      }
    }
  }
  return rep;
}

}  // namespace rdpq
