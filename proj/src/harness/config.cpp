#include "rdpq/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "rdpq/errors.hpp"
#include "rdpq/simd.hpp"
#include "rdpq/transforms.hpp"

namespace rdpq {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kVStream = 0x9E3779B97F4A7C15ull;

std::string trim(std::string s) {
  const auto notSpace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notSpace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notSpace).base(), s.end());
  return s;
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

double toDouble(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("'" + s + "' is not a number");
  return v;
}

std::uint64_t toUnsigned(const std::string& s) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("'" + s + "' is not a non-negative integer");
  return v;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ControllerMode parseMode(const std::string& s) {
  if (s == "exact") return ControllerMode::Exact;
  if (s == "state") return ControllerMode::StateQuant;
  if (s == "input") return ControllerMode::InputQuant;
  throw ConfigError("mode must be open, exact, state or input (got '" + s + "')");
}

DetectionMargin parseMargin(const std::string& s) {
  if (s == "single") return DetectionMargin::Single;
  if (s == "double") return DetectionMargin::Double;
  throw ConfigError("detection_margin must be single or double (got '" + s + "')");
}

void checkProfileSyntax(const std::string& key, const std::string& value, bool isU) {
  const auto w = words(value);
  if (w.empty()) throw ConfigError(key + " is empty");
  const auto& kind = w[0];
  auto numbersFrom = [&](std::size_t first) {
    for (std::size_t i = first; i < w.size(); ++i) toDouble(w[i]);
  };
  if (kind == "sine" && isU) {
    if (w.size() < 2) throw ConfigError(key + " = sine needs at least one coefficient");
    numbersFrom(1);
  } else if (kind == "random") {
    if (w.size() != 2 || toUnsigned(w[1]) == 0) throw ConfigError(key + " = random needs a positive mode count");
  } else if (!isU && kind == "zero" && w.size() == 1) {
  } else if (!isU && kind == "compatible" && w.size() == 1) {
  } else if (!isU && kind == "constant" && w.size() == 2) {
    numbersFrom(1);
  } else if (!isU && kind == "linear" && w.size() == 3) {
    numbersFrom(1);
  } else if (!isU && kind == "segments" && w.size() >= 2) {
    double prev = -1.0;
    for (std::size_t i = 1; i < w.size(); ++i) {
      const auto colon = w[i].find(':');
      if (colon == std::string::npos) throw ConfigError("segment '" + w[i] + "' is not of the form x:value");
      const double x = toDouble(w[i].substr(0, colon));
      toDouble(w[i].substr(colon + 1));
      if (!(x > prev) || x < 0.0 || x >= 1.0) throw ConfigError("segment starts must increase within [0, 1)");
      if (i == 1 && x != 0.0) throw ConfigError("the first segment must start at 0");
      prev = x;
    }
  } else {
    throw ConfigError("unrecognized " + key + " profile '" + value + "'");
  }
}

struct Key {
  const char* name;
  bool required;
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::optional<std::string>(const ScenarioConfig&)> get;
};

std::optional<std::string> opt(const std::optional<double>& v) {
  if (!v) return std::nullopt;
  return fmt(*v);
}

const std::vector<Key>& keys() {
  static const std::vector<Key> k = {
      {"lambda", true, [](auto& c, auto& v) { c.plant.params.lambda = toDouble(v); },
       [](auto& c) { return std::optional(fmt(c.plant.params.lambda)); }},
      {"D", true, [](auto& c, auto& v) { c.plant.params.delay = toDouble(v); },
       [](auto& c) { return std::optional(fmt(c.plant.params.delay)); }},
      {"Nx", true, [](auto& c, auto& v) { c.plant.intervals = toUnsigned(v); },
       [](auto& c) { return std::optional(std::to_string(c.plant.intervals)); }},
      {"dt", true, [](auto& c, auto& v) { c.plant.dt = toDouble(v); },
       [](auto& c) { return std::optional(fmt(c.plant.dt)); }},
      {"mode", true,
       [](auto& c, auto& v) {
         c.openLoop = v == "open";
         if (!c.openLoop) c.controller.mode = parseMode(v);
       },
       [](auto& c) { return std::optional(c.openLoop ? std::string("open") : modeName(c.controller.mode)); }},
      {"horizon", true, [](auto& c, auto& v) { c.horizon = toDouble(v); },
       [](auto& c) { return std::optional(fmt(c.horizon)); }},
      {"modes", false, [](auto& c, auto& v) { c.truncation.modeCount = toUnsigned(v); },
       [](auto& c) { return std::optional(std::to_string(c.truncation.modeCount)); }},
      {"quadrature_points", false, [](auto& c, auto& v) { c.truncation.quadraturePoints = toUnsigned(v); },
       [](auto& c) { return std::optional(std::to_string(c.truncation.quadraturePoints)); }},
      {"tail_tolerance", false, [](auto& c, auto& v) { c.truncation.tailTolerance = toDouble(v); },
       [](auto& c) { return std::optional(fmt(c.truncation.tailTolerance)); }},
      {"M", false, [](auto& c, auto& v) { c.budget.range = toDouble(v); },
       [](auto& c) { return std::optional(fmt(c.budget.range)); }},
      {"Delta", false, [](auto& c, auto& v) { c.budget.error = toDouble(v); },
       [](auto& c) { return std::optional(fmt(c.budget.error)); }},
      {"M_hat", false, [](auto& c, auto& v) { c.budget.deadzone = toDouble(v); },
       [](auto& c) { return std::optional(fmt(c.budget.deadzone)); }},
      {"saturation", false, [](auto& c, auto& v) { c.saturationFactor = toDouble(v); },
       [](auto& c) { return std::optional(fmt(c.saturationFactor)); }},
      {"tau", false, [](auto& c, auto& v) { c.controller.tau = toDouble(v); },
       [](auto& c) { return std::optional(fmt(c.controller.tau)); }},
      {"mu0", false, [](auto& c, auto& v) { c.controller.mu0 = toDouble(v); },
       [](auto& c) { return std::optional(fmt(c.controller.mu0)); }},
      {"detection_margin", false, [](auto& c, auto& v) { c.controller.margin = parseMargin(v); },
       [](auto& c) {
         return std::optional<std::string>(c.controller.margin == DetectionMargin::Single ? "single" : "double");
       }},
      {"margin", false, [](auto& c, auto& v) { c.tuning.margin = toDouble(v); },
       [](auto& c) { return std::optional(fmt(c.tuning.margin)); }},
      {"lambda1", false, [](auto& c, auto& v) { c.tuning.lambda1 = toDouble(v); },
       [](auto& c) { return opt(c.tuning.lambda1); }},
      {"epsilon", false, [](auto& c, auto& v) { c.tuning.epsilon = toDouble(v); },
       [](auto& c) { return opt(c.tuning.epsilon); }},
      {"nu", false, [](auto& c, auto& v) { c.tuning.nu = toDouble(v); }, [](auto& c) { return opt(c.tuning.nu); }},
      {"delta", false, [](auto& c, auto& v) { c.tuning.delta = toDouble(v); },
       [](auto& c) { return opt(c.tuning.delta); }},
      {"u0", false,
       [](auto& c, auto& v) {
         checkProfileSyntax("u0", v, true);
         c.u0 = v;
       },
       [](auto& c) { return std::optional(c.u0); }},
      {"v0", false,
       [](auto& c, auto& v) {
         checkProfileSyntax("v0", v, false);
         c.v0 = v;
       },
       [](auto& c) { return std::optional(c.v0); }},
      {"seed", false, [](auto& c, auto& v) { c.seed = toUnsigned(v); },
       [](auto& c) { return std::optional(std::to_string(c.seed)); }},
      {"stride", false, [](auto& c, auto& v) { c.stride = toUnsigned(v); },
       [](auto& c) { return std::optional(std::to_string(c.stride)); }},
  };
  return k;
}

double randomSineProfile(std::uint64_t seed, std::size_t modes, bool withOffset, double x) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sym(-1.0, 1.0), unit(0.0, 1.0);
  double s = withOffset ? sym(rng) : 0.0;
  for (std::size_t k = 1; k <= modes; ++k) {
    const double a = sym(rng) / static_cast<double>(k);
    const double phase = withOffset ? kPi * unit(rng) : 0.0;
    s += a * std::sin(static_cast<double>(k) * kPi * x + phase);
  }
  return s;
}

}  // namespace

std::string modeName(ControllerMode mode) {
  switch (mode) {
    case ControllerMode::Exact: return "exact";
    case ControllerMode::StateQuant: return "state";
    case ControllerMode::InputQuant: return "input";
  }
  return "unknown";
}

void ScenarioConfig::validate() const {
  plant.params.checkSeries(truncation.modeCount);
  plant.validate();
  truncation.validate();
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (stride == 0) throw ConfigError("stride must be positive");
  if (!(controller.tau > 0.0 && controller.mu0 > 0.0)) throw ConfigError("tau and mu0 must be positive");
  if (!(saturationFactor >= 1.0)) throw ConfigError("saturation must be at least 1");
  if (!openLoop && controller.mode != ControllerMode::Exact) {
    budget.validate();
    if (!(budget.deadzone < budget.error)) throw ConfigError("quantized modes need M_hat < Delta");
  }
}

ScenarioConfig parseConfig(const std::string& text) {
  ScenarioConfig c;
  std::map<std::string, std::size_t> seen;
  std::istringstream in(text);
  std::string line;
  for (std::size_t lineNo = 1; std::getline(in, line); ++lineNo) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(lineNo) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = std::find_if(keys().begin(), keys().end(), [&](const Key& k) { return key == k.name; });
    if (it == keys().end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (!seen.emplace(key, lineNo).second) throw ConfigError(where + "duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError(where + "key '" + key + "' has no value");
    try {
      it->set(c, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  for (const auto& k : keys()) {
    if (k.required && !seen.count(k.name)) throw ConfigError("missing required key '" + std::string(k.name) + "'");
  }
  // Cross-field checks report the last line among the keys involved.
  auto lineOf = [&](std::initializer_list<const char*> names) {
    std::size_t line = 0;
    for (const char* n : names) {
      if (const auto it = seen.find(n); it != seen.end()) line = std::max(line, it->second);
    }
    return "line " + std::to_string(line) + ": ";
  };
  try {
    c.plant.params.checkSeries(c.truncation.modeCount);
  } catch (const ParameterError& e) {
    const auto where = c.plant.params.delay > 0.0 ? lineOf({"lambda", "modes"}) : lineOf({"D"});
    throw ParameterError(where + e.what());
  }
  try {
    c.plant.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(lineOf({"D", "Nx", "dt"}) + e.what());
  }
  c.validate();
  return c;
}

std::string serializeConfig(const ScenarioConfig& config) {
  std::string out;
  for (const auto& k : keys()) {
    if (const auto v = k.get(config)) out += std::string(k.name) + " = " + *v + "\n";
  }
  return out;
}

ScenarioConfig loadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parseConfig(buf.str());
}

Profile makeInitialU(const ScenarioConfig& config) {
  const auto w = words(config.u0);
  if (w[0] == "random") {
    const auto modes = static_cast<std::size_t>(toUnsigned(w[1]));
    const auto seed = config.seed;
    return [seed, modes](double x) { return randomSineProfile(seed, modes, false, x); };
  }
  std::vector<double> a;
  for (std::size_t i = 1; i < w.size(); ++i) a.push_back(toDouble(w[i]));
  return [a](double x) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * std::sin(static_cast<double>(k + 1) * kPi * x);
    return s;
  };
}

Profile makeInitialV(const ScenarioConfig& config, const Profile& u0, const TransformOperators* ops) {
  const auto w = words(config.v0);
  const auto& kind = w[0];
  if (kind == "zero") return [](double) { return 0.0; };
  if (kind == "constant") {
    const double c = toDouble(w[1]);
    return [c](double) { return c; };
  }
  if (kind == "linear") {
    const double a = toDouble(w[1]), b = toDouble(w[2]);
    return [a, b](double x) { return a + b * x; };
  }
  if (kind == "segments") {
    std::vector<std::pair<double, double>> seg;
    for (std::size_t i = 1; i < w.size(); ++i) {
      const auto colon = w[i].find(':');
      seg.emplace_back(toDouble(w[i].substr(0, colon)), toDouble(w[i].substr(colon + 1)));
    }
    return [seg](double x) {
      double v = seg.front().second;
      for (const auto& [start, value] : seg) {
        if (x >= start) v = value;
      }
      return v;
    };
  }
  if (kind == "random") {
    const auto modes = static_cast<std::size_t>(toUnsigned(w[1]));
    const auto seed = config.seed ^ kVStream;
    return [seed, modes](double x) { return randomSineProfile(seed, modes, true, x); };
  }
  // compatible: v0(x) = a x with a = U_nom(0).
  if (!ops) throw ConfigError("v0 = compatible needs the predictor operators");
  const auto& grid = ops->grid();
  std::vector<double> us(grid.size()), ramp(grid.size());
  for (std::size_t i = 0; i < us.size(); ++i) {
    us[i] = i == 0 ? 0.0 : u0(grid.node(i));
    ramp[i] = grid.node(i);
  }
  us.back() = 0.0;  // the plant pins u(1) to v0(0) = 0
  const double a = simd::dot(ops->predictorStateWeights(), us) /
                   (1.0 - simd::dot(ops->predictorActuatorWeights(), ramp));
  return [a](double x) { return a * x; };
}

}  // namespace rdpq
