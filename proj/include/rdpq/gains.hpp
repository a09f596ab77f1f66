#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rdpq/kernels.hpp"
#include "rdpq/params.hpp"

namespace rdpq {

enum class QuantMode { State, Input };

/// Range M, error bound Delta and deadzone threshold M-hat of the normalized
/// quantizer, all in state units.
struct QuantizerBudget {
  double range = 1.0;
  double error = 0.0;
  double deadzone = 0.0;

  /// M > 0, 0 <= Delta < M, 0 <= M-hat < M. Throws ParameterError.
  void validate() const;
};

struct TildeConstants {
  double k = 1.0, l = 1.0, g = 1.0, p = 1.0, gamma = 1.0, delta = 1.0;
};

struct SpectralConstants {
  double sigma1 = 0.0;
  double seriesG = 0.0;
  /// Upper bound on the truncation error of seriesG.
  double seriesGUncertainty = 0.0;
  double overshoot = 0.0;  // M-bar_1
};

struct Auxiliaries {
  double epsilon = 0.0, nu = 0.0, delta = 0.0;
  double phi = 0.0, phi1 = 0.0, m0 = 0.0;
};

/// Free design parameters. Unset overrides fall back to the deterministic
/// defaults (closed-form lambda_1, decade search for epsilon = nu,
/// delta = min{pi^2, nu}/2).
struct DesignTuning {
  double margin = 0.1;
  std::optional<double> lambda1;
  std::optional<double> epsilon;
  std::optional<double> nu;
  std::optional<double> delta;
};

struct DesignConstants {
  PlantParams plant;
  std::size_t modeCount = 0;

  TildeConstants tilde;
  double m1 = 0.0, m2 = 0.0;
  double m3 = 0.0;
  /// M3 recomputed with twice the modes, and whether the two agree to the
  /// truncation tail tolerance.
  double m3Refined = 0.0;
  bool m3Converged = false;
  double mBar = 0.0;

  SpectralConstants spectral;
  double lambda1 = 0.0;
  Auxiliaries aux;

  // Budget-dependent; NaN until withBudget.
  double omega;
  double dwell;
  double overallRate;

  DesignConstants();
};

TildeConstants computeTildeConstants(const KernelTables& tables);

struct Equivalence {
  double m1, m2;
};
Equivalence computeEquivalence(const TildeConstants& t);

/// sigma_1 = lambda - pi^2, G = 4 sqrt(sum n^2 pi^2/(lambda - n^2 pi^2)^2) summed
/// to `terms` with an analytic tail bound, M-bar_1 = max{sqrt 2, G + 1}.
SpectralConstants computeSpectralConstants(const PlantParams& params, std::size_t terms = 10'000'000);

/// Smallest lambda_1 >= 0 with 1/(1+lambda_1) <= (1-margin) e^{-D}/(1+sqrt(3)/3).
double selectLambda1(const PlantParams& params, double margin);

/// True iff 1/(1+lambda_1) < e^{-D}/(1+sqrt(3)/3).
bool smallGainHolds(const PlantParams& params, double lambda1);

Auxiliaries evaluateAuxiliaries(const PlantParams& params, double lambda1, double epsilon, double nu, double delta);
Auxiliaries selectAuxiliaries(const PlantParams& params, double lambda1);

/// ||gamma(1,.)||_2 + D max |g(1,y)| from the tables.
double computeM3(const KernelTables& tables);

/// Every budget-independent constant.
DesignConstants computeDesignConstants(const KernelTables& tables, const DesignTuning& tuning = {});

struct OmegaT {
  double omega, dwell, overallRate;
};
/// Omega = (1+lambda_1)(1+M0)^2 Delta M3/(M2 M), T = -ln(Omega/(1+M0))/delta.
/// Throws InfeasibleError when Omega >= 1 + M0.
OmegaT computeOmegaT(const DesignConstants& c, const QuantizerBudget& budget);

/// Copy of c with omega, dwell and overallRate filled in.
DesignConstants withBudget(DesignConstants c, const QuantizerBudget& budget);

/// Right-hand side of the Delta/M condition for the given mode.
double budgetRatioBound(const DesignConstants& c, QuantMode mode);

struct BudgetCertificate {
  QuantMode mode = QuantMode::State;
  bool passed = false;
  double ratio = 0.0;
  double bound = 0.0;
  double omega = 0.0;
  double dwell = 0.0;
  double overallRate = 0.0;
  std::string message;
};

BudgetCertificate validateBudget(const QuantizerBudget& budget, const DesignConstants& c, QuantMode mode);

/// Coefficient of the trajectory bound
///   ||u||_2 + ||v||_inf <= coeff * (||u0||_2 + ||v0||_inf)^(2 - r/sigma_1) e^{r t},
/// r = ln Omega / T. Requires withBudget.
double theoremGamma(const DesignConstants& c, const QuantizerBudget& budget, double tau, double mu0, QuantMode mode);

/// Human-readable aligned listing and `name=value` flat form.
std::vector<std::pair<std::string, double>> constantsLedger(const DesignConstants& c);
std::string formatLedger(const DesignConstants& c);
std::string formatFlat(const DesignConstants& c);

}  // namespace rdpq
