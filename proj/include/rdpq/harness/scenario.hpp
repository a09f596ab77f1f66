#pragma once

#include <memory>
#include <optional>
#include <string>

#include "rdpq/controller.hpp"
#include "rdpq/harness/config.hpp"

namespace rdpq {

enum ExitCode : int { kExitOk = 0, kExitBoundViolation = 2, kExitInfeasible = 3 };

/// Everything a run needs, built once from a config.
struct ScenarioSetup {
  ScenarioConfig config;
  KernelTables tables;
  std::unique_ptr<TransformOperators> ops;
  std::optional<DesignConstants> constants;  // set for quantized modes
  std::optional<BudgetCertificate> certificate;
  std::optional<QuantizerSpec> spec;
  Profile u0, v0;
};

/// Builds tables, operators and (for quantized modes) constants and the
/// budget certificate. Does not throw on a failed certificate.
ScenarioSetup prepareScenario(const ScenarioConfig& config);

struct ScenarioResult {
  int exitCode = kExitOk;
  std::string message;
  Trajectory trajectory;
  std::optional<BudgetCertificate> certificate;
  std::optional<BoundReport> bound;
  std::optional<double> detectionTime;
  std::optional<DesignConstants> constants;
};

/// Simulates the configured scenario and, if `csvPath` is non-empty, writes the
/// trajectory CSV there. Exit codes: 0 ok, 2 theorem bound violated,
/// 3 budget infeasible (nothing is simulated).
ScenarioResult runScenario(const ScenarioConfig& config, const std::string& csvPath = {},
                           const StepObserver& observer = {});
ScenarioResult runScenario(const ScenarioSetup& setup, const std::string& csvPath = {},
                           const StepObserver& observer = {});

}  // namespace rdpq
