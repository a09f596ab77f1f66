#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "rdpq/gains.hpp"
#include "rdpq/transforms.hpp"

namespace rdpq {

/// Uniform mid-tread quantizer with per-sample saturation at +-saturationFactor*M
/// and a norm-level deadzone.
struct QuantizerSpec {
  double step = 0.0;
  double range = 1.0;     // M
  double error = 0.0;     // Delta
  double deadzone = 0.0;  // M-hat
  double saturationFactor = 10.0;

  /// step = (Delta - M-hat)/2. Pointwise rounding moves the joint norm by at
  /// most one step, so zeroing whenever the quantized norm is <= M-hat + step
  /// catches every input with norm <= M-hat while keeping the error <= Delta.
  static QuantizerSpec fromBudget(const QuantizerBudget& budget, double saturationFactor = 10.0);

  /// step > 0, M > 0, M-hat + 2 step <= Delta < M, saturationFactor >= 1.
  void validate() const;

  double maxLevel() const;
  /// Deadzone thresholds on the unscaled quantized output.
  double pairThreshold() const { return deadzone + step; }
  double scalarThreshold() const { return deadzone + 0.5 * step; }
};

double quantizeScalar(double x, const QuantizerSpec& spec);

/// Sample-wise quantizeScalar; no deadzone.
Field quantizeField(const Field& f, const QuantizerSpec& spec);

/// mu q(u/mu), mu q(v/mu) with the deadzone wrapper. Throws DomainError for mu <= 0.
CascadePair zoomQuantizePair(const CascadePair& pair, double mu, const QuantizerSpec& spec);

/// In-place form over raw samples; returns true when the deadzone zeroed the output.
bool zoomQuantizeSamples(const Grid& grid, std::span<const double> u, std::span<const double> v, double mu,
                         const QuantizerSpec& spec, std::span<double> qu, std::span<double> qv);

/// mu q(U/mu) with scalar deadzone. Throws DomainError for mu <= 0.
double inputQuantize(double value, double mu, const QuantizerSpec& spec);

struct RegimeStats {
  std::size_t draws = 0;
  std::size_t violations = 0;
  /// Smallest slack of the property checked in this regime (negative = violated).
  double worstMargin = 0.0;
  std::string firstViolation;
};

struct PropertyReport {
  RegimeStats pairDeadzone, pairInRange, pairOutOfRange;
  RegimeStats scalarDeadzone, scalarInRange, scalarOutOfRange;

  bool passed() const;
  std::string text() const;
  std::string summaryLine() const;
};

/// Random smooth pairs (finite sine sums) and scalars drawn in the regimes
/// <= M-hat, (M-hat, M] and (M, saturationFactor*M], each at a random zoom.
/// Throws ParameterError if sampleCount < 1000.
PropertyReport verifyProperties(const QuantizerSpec& spec, std::size_t sampleCount, std::uint64_t seed,
                                const Grid& grid = Grid(200));

}  // namespace rdpq
