#include "rdpq/harness/presets.hpp"

#include <array>

#include "rdpq/errors.hpp"

namespace rdpq {
namespace {

// Kept in sync with configs/*.cfg (checked by the harness tests).
struct Preset {
  const char* name;
  const char* text;
};

constexpr std::array kPresets{
    Preset{"openloop-eigen", R"cfg(# Open loop from the first eigenfunction; grows like exp((lambda - pi^2) t).
lambda = 11
D = 0.1
Nx = 200
dt = 1e-4
mode = open
horizon = 1
u0 = sine 1
v0 = zero
stride = 100
)cfg"},
    Preset{"exact-predictor", R"cfg(# Unquantized predictor feedback from t = 0. The actuator starts on the
# profile consistent with the first predictor output.
lambda = 11
D = 0.1
Nx = 200
dt = 1e-4
modes = 60
mode = exact
horizon = 2
u0 = sine 1
v0 = compatible
stride = 100
)cfg"},
    Preset{"state-quant-ref", R"cfg(# Switched predictor feedback with a quantized plant and actuator state.
# Delta/M sits at about half of the admissible ratio, giving Omega ~ 0.5.
lambda = 11
D = 0.1
Nx = 200
dt = 1e-4
modes = 60
mode = state
M = 1
Delta = 1.9e-6
M_hat = 4.75e-7
tau = 0.1
mu0 = 1
margin = 0.1
horizon = 3800
u0 = sine 1
v0 = zero
stride = 1000
)cfg"},
    Preset{"input-quant-ref", R"cfg(# Switched predictor feedback with a quantized control input.
lambda = 11
D = 0.1
Nx = 200
dt = 1e-4
modes = 60
mode = input
M = 1
Delta = 1.9e-6
M_hat = 4.75e-7
tau = 0.1
mu0 = 1
margin = 0.1
horizon = 1600
u0 = sine 1
v0 = zero
stride = 1000
)cfg"},
};

}  // namespace

std::vector<std::string> presetNames() {
  std::vector<std::string> out;
  for (const auto& p : kPresets) out.emplace_back(p.name);
  return out;
}

std::optional<std::string> presetText(std::string_view name) {
  for (const auto& p : kPresets) {
    if (name == p.name) return std::string(p.text);
  }
  return std::nullopt;
}

ScenarioConfig presetConfig(std::string_view name) {
  const auto text = presetText(name);
  if (!text) throw ConfigError("unknown preset '" + std::string(name) + "'");
  return parseConfig(*text);
}

}  // namespace rdpq
