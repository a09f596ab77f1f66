#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rdpq {

struct AcceptanceOptions {
  /// Multiplies every tolerance; 0 forces failures (smoke test of the reporter).
  double toleranceScale = 1.0;
  /// Run only these criterion ids (1-based); empty runs all.
  std::vector<int> only;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budgetSeconds = 0.0;
};

struct AcceptanceSummary {
  std::vector<CriterionResult> results;
  bool allPassed() const;
  std::vector<int> failed() const;
};

/// Runs the criteria in order, printing one line per criterion to `out`.
AcceptanceSummary runAcceptance(const AcceptanceOptions& options, std::ostream& out);

}  // namespace rdpq
