#pragma once

#include <cstdint>
#include <string>

#include "rdpq/controller.hpp"
#include "rdpq/gains.hpp"
#include "rdpq/kernels.hpp"
#include "rdpq/plant.hpp"

namespace rdpq {

/// Scenario description read from `key = value` files.
///
/// Initial conditions:
///   u0 = sine a1 a2 ...      sum_k a_k sin(k pi x)
///   u0 = random K            K random sine modes drawn from `seed`
///   v0 = zero | constant c | linear a b (a + b x)
///   v0 = segments x0:c0 x1:c1 ...   piecewise constant, c_i on [x_i, x_{i+1})
///   v0 = random K            random smooth profile drawn from `seed`
///   v0 = compatible          linear profile a x with a chosen so that the
///                            first predictor output equals v0(1)
struct ScenarioConfig {
  PlantConfig plant;
  SeriesTruncation truncation;
  QuantizerBudget budget;
  double saturationFactor = 10.0;
  DesignTuning tuning;
  ControllerSettings controller;
  /// `mode = open`: U = 0 throughout (controller settings are ignored).
  bool openLoop = false;
  double horizon = 1.0;
  std::string u0 = "sine 1";
  std::string v0 = "zero";
  std::uint64_t seed = 0;
  std::size_t stride = 100;

  /// Cross-field checks (alignment, budget invariants, resonance). Throws ConfigError / ParameterError.
  void validate() const;
};

/// Throws ConfigError with a `line N:` prefix for syntax errors and unknown keys.
ScenarioConfig parseConfig(const std::string& text);
std::string serializeConfig(const ScenarioConfig& config);
ScenarioConfig loadConfig(const std::string& path);

std::string modeName(ControllerMode mode);

/// Builds u0 and v0 profiles; `compatible` needs the predictor operators.
Profile makeInitialU(const ScenarioConfig& config);
Profile makeInitialV(const ScenarioConfig& config, const Profile& u0, const TransformOperators* ops);

}  // namespace rdpq
