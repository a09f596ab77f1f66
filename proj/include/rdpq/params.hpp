#pragma once

#include <cstddef>

namespace rdpq {

/// Reaction coefficient lambda (1/time) and input delay D (time).
struct PlantParams {
  double lambda = 0.0;
  double delay = 0.0;

  /// lambda > 0, D > 0 and lambda != n^2 pi^2 for n = 1..modes (within 1e-6).
  /// Throws ParameterError naming the offending mode.
  void checkSeries(std::size_t modes) const;

  /// Additionally requires the open-loop instability premise lambda > pi^2
  /// and rejects resonance for every n.
  void checkUnstable() const;

  friend bool operator==(const PlantParams&, const PlantParams&) = default;
};

/// Absolute distance below which lambda counts as resonant with n^2 pi^2.
inline constexpr double kResonanceTolerance = 1e-6;

/// Returns the mode n >= 1 with |lambda - n^2 pi^2| <= kResonanceTolerance, or 0.
std::size_t resonantMode(double lambda);

}  // namespace rdpq
