#include "rdpq/harness/scenario.hpp"

#include <fstream>

#include "rdpq/errors.hpp"

namespace rdpq {

ScenarioSetup prepareScenario(const ScenarioConfig& config) {
  config.validate();
  ScenarioSetup s;
  s.config = config;
  s.tables = buildTables(Grid(config.plant.intervals), config.plant.params, config.truncation);
  s.ops = std::make_unique<TransformOperators>(s.tables);
  if (!config.openLoop && config.controller.mode != ControllerMode::Exact) {
    s.constants = computeDesignConstants(s.tables, config.tuning);
    const auto mode = config.controller.mode == ControllerMode::StateQuant ? QuantMode::State : QuantMode::Input;
    s.certificate = validateBudget(config.budget, *s.constants, mode);
    if (s.certificate->passed) {
      s.constants = withBudget(*s.constants, config.budget);
      s.spec = QuantizerSpec::fromBudget(config.budget, config.saturationFactor);
    }
  }
  s.u0 = makeInitialU(config);
  s.v0 = makeInitialV(config, s.u0, s.ops.get());
  return s;
}

ScenarioResult runScenario(const ScenarioConfig& config, const std::string& csvPath, const StepObserver& observer) {
  return runScenario(prepareScenario(config), csvPath, observer);
}

ScenarioResult runScenario(const ScenarioSetup& s, const std::string& csvPath, const StepObserver& observer) {
  const auto& cfg = s.config;
  ScenarioResult r;
  r.certificate = s.certificate;
  r.constants = s.constants;
  if (s.certificate && !s.certificate->passed) {
    r.exitCode = kExitInfeasible;
    r.message = s.certificate->message;
    return r;
  }

  PlantState state(cfg.plant, s.u0, s.v0);
  if (cfg.openLoop) {
    ZeroInput zero;
    r.trajectory = simulate(state, zero, cfg.horizon, cfg.stride, observer);
    r.message = "open-loop run complete";
  } else {
    const auto spec = s.spec.value_or(QuantizerSpec{});
    const auto constants = s.constants.value_or(DesignConstants{});
    Controller controller(cfg.controller, *s.ops, constants, cfg.budget, spec);
    r.trajectory = simulate(state, controller, cfg.horizon, cfg.stride, observer);
    r.detectionTime = controller.detectionTime();
    if (cfg.controller.mode == ControllerMode::Exact) {
      r.message = "exact predictor run complete";
    } else {
      r.bound = theoremBoundCheck(r.trajectory, *s.constants, cfg.budget, cfg.controller.mode, cfg.controller.tau,
                                  cfg.controller.mu0);
      if (!r.bound->passed) {
        r.exitCode = kExitBoundViolation;
        r.message = "trajectory bound violated at t = " + std::to_string(r.bound->violationTime);
      } else {
        r.message = "trajectory bound holds at every record";
      }
    }
  }

  if (!csvPath.empty()) {
    std::ofstream out(csvPath, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + csvPath + "'");
    writeCsv(out, r.trajectory);
  }
  return r;
}

}  // namespace rdpq
