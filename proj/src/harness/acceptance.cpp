#include "rdpq/harness/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <random>

#include "rdpq/bessel.hpp"
#include "rdpq/controller.hpp"
#include "rdpq/errors.hpp"
#include "rdpq/gains.hpp"
#include "rdpq/harness/presets.hpp"
#include "rdpq/harness/scenario.hpp"
#include "rdpq/kernels.hpp"
#include "rdpq/plant.hpp"
#include "rdpq/quantizers.hpp"
#include "rdpq/transforms.hpp"

namespace rdpq {
namespace {

constexpr double kPi = std::numbers::pi;

// Reference configuration.
constexpr double kLambda = 11.0;
constexpr double kDelay = 0.1;
constexpr std::size_t kNx = 200;
constexpr std::size_t kModes = 60;

struct Outcome {
  bool passed;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

/// Shared reference tables, built on first use.
class Reference {
 public:
  const KernelTables& tables() {
    if (!tables_) tables_ = buildTables(Grid(kNx), {kLambda, kDelay}, SeriesTruncation{});
    return *tables_;
  }
  const TransformOperators& ops() {
    if (!ops_) ops_ = std::make_unique<TransformOperators>(tables());
    return *ops_;
  }
  const DesignConstants& constants() {
    if (!constants_) constants_ = computeDesignConstants(tables());
    return *constants_;
  }

 private:
  std::optional<KernelTables> tables_;
  std::unique_ptr<TransformOperators> ops_;
  std::optional<DesignConstants> constants_;
};

/// u = sum a_k sin(k pi x)/k, v = c + sum b_k sin(k pi x + phi_k)/k with
/// uniform coefficients in [-1, 1].
CascadePair randomSmoothPair(const Grid& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> sym(-1.0, 1.0), unit(0.0, 1.0);
  std::vector<double> u(grid.size(), 0.0), v(grid.size(), sym(rng));
  for (int k = 1; k <= 5; ++k) {
    const double a = sym(rng) / k, b = sym(rng) / k, phase = kPi * unit(rng);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.node(i);
      u[i] += a * std::sin(k * kPi * x);
      v[i] += b * std::sin(k * kPi * x + phase);
    }
  }
  return CascadePair::fromSamples(grid, std::move(u), std::move(v));
}

double pairDistance(const CascadePair& a, const CascadePair& b) {
  const auto& grid = a.u.grid();
  std::vector<double> du(grid.size()), dv(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    du[i] = a.u[i] - b.u[i];
    dv[i] = a.v[i] - b.v[i];
  }
  return l2Norm(grid, du) + supNorm(dv);
}

double rowDistance(const Grid& grid, std::span<const double> a, std::span<const double> b) {
  std::vector<double> d(grid.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
  return l2Norm(grid, d);
}

double slope(const std::vector<double>& t, const std::vector<double>& y) {
  const double n = static_cast<double>(t.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sx += t[i];
    sy += y[i];
    sxx += t[i] * t[i];
    sxy += t[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// 1. Bessel oracle.
Outcome besselOracle(Reference&, double s) {
  const double tol = 1e-6 * s;
  const double i1 = besselI1(1.0), j1 = besselJ1(1.0);
  const double ei = std::fabs(i1 - 0.5651591), ej = std::fabs(j1 - 0.4400506);
  return {ei <= tol && ej <= tol, format("I1(1)=%.9f (err %.2e), J1(1)=%.9f (err %.2e), tol %.1e", i1, ei, j1, ej, tol)};
}

// 2. Kernel limits.
Outcome kernelLimits(Reference&, double) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t bad = 0;
  for (int k = 0; k < 100; ++k) {
    const double x = unit(rng);
    const double limit = -kLambda * x / 2.0;
    if (kernelK(x, x, kLambda) != limit || kernelL(x, x, kLambda) != limit) ++bad;
    if (kernelK(x, 0.0, kLambda) != 0.0 || kernelL(x, 0.0, kLambda) != 0.0) ++bad;
  }
  return {bad == 0, format("%zu of 200 diagonal/edge checks differ from the exact limits", bad)};
}

// 3. Series consistency.
Outcome seriesConsistency(Reference& ref, double s) {
  const double tol = 1e-2 * s;
  const auto& t60 = ref.tables();
  SeriesTruncation tr120;
  tr120.modeCount = 2 * kModes;
  tr120.quadraturePoints = 4001;
  const auto t120 = buildTables(t60.grid, t60.plantParams, tr120);
  const auto& g = t60.grid;
  const std::size_t last = g.size() - 1;
  const double gk60 = rowDistance(g, t60.gammaGrid.row(0), t60.kGrid.row(last));
  const double dl60 = rowDistance(g, t60.deltaGrid.row(0), t60.lGrid.row(last));
  const double gk120 = rowDistance(g, t120.gammaGrid.row(0), t120.kGrid.row(last));
  const double dl120 = rowDistance(g, t120.deltaGrid.row(0), t120.lGrid.row(last));
  const bool ok = gk60 <= tol && dl60 <= tol && gk120 < gk60 && dl120 < dl60;
  return {ok, format("|gamma(0,.)-k(1,.)|: N=60 %.4g, N=120 %.4g; |delta(0,.)-l(1,.)|: N=60 %.4g, N=120 %.4g; tol %.1e",
                     gk60, gk120, dl60, dl120, tol)};
}

// 4. Transform round trip.
Outcome roundTrip(Reference& ref, double s) {
  const double tol = 1e-3 * s;
  const auto& ops = ref.ops();
  std::mt19937_64 rng(4);
  double worst = 0.0;
  std::size_t bad = 0;
  for (int k = 0; k < 20; ++k) {
    const auto pair = randomSmoothPair(ops.grid(), rng);
    const auto back = inverseTransform(directTransform(pair, ops), ops);
    const double rel = pairDistance(back, pair) / jointNorm(pair);
    worst = std::max(worst, rel);
    if (rel > tol) ++bad;
  }
  return {bad == 0, format("worst relative round-trip error %.4g over 20 pairs (%zu above tol %.1e)", worst, bad, tol)};
}

// 5. Norm equivalence.
Outcome normEquivalence(Reference& ref, double) {
  const auto& ops = ref.ops();
  const auto& c = ref.constants();
  std::mt19937_64 rng(5);
  std::size_t bad = 0;
  double lo = INFINITY, hi = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto pair = randomSmoothPair(ops.grid(), rng);
    const double n = jointNorm(pair), nt = jointNorm(directTransform(pair, ops));
    lo = std::min(lo, nt / n);
    hi = std::max(hi, nt / n);
    if (nt < c.m2 * n || nt > c.m1 * n) ++bad;
  }
  return {bad == 0, format("||(w,z)||/||(u,v)|| in [%.4g, %.4g]; M2 = %.4g, M1 = %.4g; %zu violations", lo, hi, c.m2,
                           c.m1, bad)};
}

// 6. Open-loop physics.
Outcome openLoopPhysics(Reference&, double s) {
  const double tolShape = 1e-3 * s, tolRate = 1e-2 * s;
  auto cfg = presetConfig("openloop-eigen");
  PlantState state(cfg.plant, makeInitialU(cfg), makeInitialV(cfg, nullptr, nullptr));
  ZeroInput zero;
  std::vector<double> ts, logs;
  const double sigma1 = kLambda - kPi * kPi;
  double shapeErr = -1.0;
  simulate(state, zero, 0.5, 1, [&](const PlantState& st, double) {
    const double t = st.time();
    const auto n = st.stepIndex();
    if (n % 100 == 0 && t >= 0.2 - 1e-12) {
      ts.push_back(t);
      logs.push_back(std::log(l2Norm(st.grid(), st.u())));
    }
    if (n == 5000) {
      const auto& g = st.grid();
      std::vector<double> exact(g.size()), diff(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) {
        exact[i] = std::exp(sigma1 * t) * std::sin(kPi * g.node(i));
        diff[i] = st.u()[i] - exact[i];
      }
      shapeErr = l2Norm(g, diff) / l2Norm(g, exact);
    }
  });
  const double rate = slope(ts, logs);
  const double rateErr = std::fabs(rate - sigma1) / sigma1;
  return {shapeErr >= 0.0 && shapeErr <= tolShape && rateErr <= tolRate,
          format("relative L2 error at t=0.5: %.3g (tol %.1e); growth exponent %.6f vs sigma1 %.6f (rel %.2e, tol %.1e)",
                 shapeErr, tolShape, rate, sigma1, rateErr, tolRate)};
}

// 7. Open-loop bound.
Outcome openLoopBound(Reference& ref, double s) {
  const auto& c = ref.constants();
  const double slack = 0.05 * s;
  double worst = 0.0;
  std::size_t bad = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto cfg = presetConfig("openloop-eigen");
    cfg.u0 = "random 5";
    cfg.v0 = "random 5";
    cfg.seed = seed;
    PlantState state(cfg.plant, makeInitialU(cfg), makeInitialV(cfg, nullptr, nullptr));
    const auto rep = openLoopBoundCheck(state, 1.0, 10, c.spectral.overshoot, c.spectral.sigma1, slack);
    worst = std::max(worst, rep.worstRatio);
    if (!rep.passed) ++bad;
  }
  return {bad == 0, format("worst ratio to M-bar1 e^{sigma1 t} ||X0|| over 20 ICs: %.4g (limit %.3f); %zu failures",
                           worst, 1.0 + slack, bad)};
}

// 8. Quantizer properties.
Outcome quantizerProperties(Reference&, double s) {
  const auto cfg = presetConfig("state-quant-ref");
  auto spec = QuantizerSpec::fromBudget(cfg.budget, cfg.saturationFactor);
  // Scale 0 shrinks the admissible error so the error-bound check must fail.
  spec.error *= s;
  const auto rep = verifyProperties(spec, 10000, 8);
  return {rep.passed(), rep.summaryLine()};
}

// 9. Exact-predictor target consistency.
Outcome exactPredictor(Reference& ref, double s) {
  const double tolZ = 1e-2 * s;
  const double slopeLimit = -(kPi * kPi - 0.5 * s);
  const double tolU = 1e-3 * s;
  const auto cfg = presetConfig("exact-predictor");
  const auto& ops = ref.ops();
  const auto u0 = makeInitialU(cfg);
  PlantState state(cfg.plant, u0, makeInitialV(cfg, u0, &ops));
  Controller controller(cfg.controller, ops, DesignConstants{}, cfg.budget, QuantizerSpec{});
  double zMax = 0.0;
  std::vector<double> ts, logw;
  const auto kSteps = cfg.plant.delaySteps();
  simulate(state, controller, cfg.horizon, cfg.stride, [&](const PlantState& st, double) {
    const auto n = st.stepIndex();
    if (n < kSteps || n % 10 != 0) return;
    const auto wz = directTransform(st.pair(), ops);
    zMax = std::max(zMax, supNorm(wz.v));
    ts.push_back(st.time());
    logw.push_back(std::log(l2Norm(wz.u)));
  });
  const double finalU = l2Norm(state.grid(), state.u());
  const double wSlope = slope(ts, logw);
  const bool ok = zMax <= tolZ && wSlope <= slopeLimit && finalU < tolU;
  return {ok, format("max ||z||_inf for t >= D: %.3g (tol %.1e); ||w||_2 slope %.4f (limit %.4f); ||u(2)||_2 = %.3g "
                     "(tol %.1e)",
                     zMax, tolZ, wSlope, slopeLimit, finalU, tolU)};
}

struct QuantRun {
  Trajectory traj;
  std::optional<double> t0;
  double muT0 = 0.0;
  double dwellNorm = -1.0;  // ||w|| + ||z|| at t0 + T
  BoundReport bound;
};

QuantRun runQuantized(Reference& ref, const ScenarioConfig& cfg, double slack) {
  const auto& ops = ref.ops();
  const auto c = withBudget(ref.constants(), cfg.budget);
  const auto spec = QuantizerSpec::fromBudget(cfg.budget, cfg.saturationFactor);
  const auto u0 = makeInitialU(cfg);
  PlantState state(cfg.plant, u0, makeInitialV(cfg, u0, &ops));
  Controller controller(cfg.controller, ops, c, cfg.budget, spec);
  QuantRun run;
  std::optional<std::size_t> probeStep;
  run.traj = simulate(state, controller, cfg.horizon, cfg.stride, [&](const PlantState& st, double) {
    if (!probeStep && controller.detectionTime()) {
      probeStep = st.stepIndex() + static_cast<std::size_t>(std::ceil(c.dwell / cfg.plant.dt));
    }
    if (probeStep && st.stepIndex() == *probeStep) run.dwellNorm = jointNorm(directTransform(st.pair(), ops));
  });
  run.t0 = controller.detectionTime();
  if (run.t0) run.muT0 = controller.schedule().muAtDetection();
  run.bound = theoremBoundCheck(run.traj, c, cfg.budget, cfg.controller.mode, cfg.controller.tau, cfg.controller.mu0,
                                slack);
  return run;
}

/// Largest relative deviation of recorded mu from mu(t0) Omega^{i-1}, and of
/// successive plateau ratios from Omega.
double zoomContractionError(const QuantRun& run, const DesignConstants& c) {
  double worst = 0.0;
  double prevLevel = 0.0;
  for (const auto& r : run.traj.records) {
    if (r.phase != Phase::Dwell) continue;
    const auto i = static_cast<long long>(std::floor((r.t - *run.t0) / c.dwell)) + 1;
    double expected = run.muT0;
    for (long long k = 1; k < i; ++k) expected *= c.omega;
    worst = std::max(worst, std::fabs(r.mu - expected) / expected);
    if (prevLevel > 0.0 && r.mu != prevLevel) worst = std::max(worst, std::fabs(r.mu / prevLevel - c.omega) / c.omega);
    prevLevel = r.mu;
  }
  return worst;
}

// 10. State-quantized closed loop end-to-end.
Outcome theorem1(Reference& ref, double s) {
  const auto cfg = presetConfig("state-quant-ref");
  const auto c = withBudget(ref.constants(), cfg.budget);
  const auto cert = validateBudget(cfg.budget, c, QuantMode::State);
  if (!cert.passed) return {false, cert.message};
  const auto run = runQuantized(ref, cfg, 0.05 * s);
  if (!run.t0) return {false, "detection never fired"};
  const double tBound = stateDetectionBound(c, cfg.budget, cfg.controller.mu0, run.traj.initialNorm) +
                        cfg.controller.tau * s;
  const double muErr = zoomContractionError(run, c);
  const bool muOk = muErr <= 1e-12 * s;
  const double tail = tailSlope(run.traj, *run.t0 + c.dwell);
  const double tailLimit = c.overallRate + 0.1 * s * std::fabs(c.overallRate);
  const bool spans = cfg.horizon >= *run.t0 + 2.0 * c.dwell;
  const bool ok = *run.t0 <= tBound && muOk && run.bound.passed && tail <= tailLimit && spans;
  return {ok, format("t0 = %.4f (bound %.4f); mu contraction error %.2e; bound min relative slack %.4g%s; tail slope "
                     "%.6g (limit %.6g, rate lnOmega/T = %.6g)",
                     *run.t0, tBound, muErr, run.bound.minRelativeSlack,
                     run.bound.passed ? "" : format(" VIOLATED at t=%.4f", run.bound.violationTime).c_str(), tail,
                     tailLimit, c.overallRate)};
}

// 11. Input-quantized closed loop end-to-end.
Outcome theorem2(Reference& ref, double s) {
  const auto cfg = presetConfig("input-quant-ref");
  const auto c = withBudget(ref.constants(), cfg.budget);
  const auto cert = validateBudget(cfg.budget, c, QuantMode::Input);
  if (!cert.passed) return {false, cert.message};
  const auto run = runQuantized(ref, cfg, 0.05 * s);
  if (!run.t0) return {false, "detection never fired"};
  const double tBound = inputDetectionBound(c, cfg.budget, cfg.controller.mu0, run.traj.initialNorm) +
                        cfg.controller.tau * s;
  const double dwellLimit =
      (1.0 + 0.1 * s) * c.omega * c.m2 * cfg.budget.range * run.muT0 / ((1.0 + c.aux.m0) * c.m3);
  const bool dwellOk = run.dwellNorm >= 0.0 && run.dwellNorm <= dwellLimit;
  const bool ok = *run.t0 <= tBound && run.bound.passed && dwellOk;
  return {ok, format("t0 = %.4f (bound %.4f); bound min relative slack %.4g%s; ||w||+||z|| at t0+T = %.4g (limit %.4g)",
                     *run.t0, tBound, run.bound.minRelativeSlack,
                     run.bound.passed ? "" : format(" VIOLATED at t=%.4f", run.bound.violationTime).c_str(),
                     run.dwellNorm, dwellLimit)};
}

// 12. Feasibility gate.
Outcome feasibilityGate(Reference& ref, double) {
  const auto& c = ref.constants();
  std::size_t bad = 0;
  std::string codes;
  for (const auto mode : {QuantMode::State, QuantMode::Input}) {
    const double bound = budgetRatioBound(c, mode);
    for (const double factor : {1.0, 1.5}) {
      QuantizerBudget b{1.0, bound * factor, 0.0};
      if (validateBudget(b, c, mode).passed) ++bad;
    }
    if (!validateBudget(QuantizerBudget{1.0, 0.0, 0.0}, c, mode).passed) ++bad;
  }
  for (const char* name : {"state-quant-ref", "input-quant-ref"}) {
    auto cfg = presetConfig(name);
    const auto mode = cfg.controller.mode == ControllerMode::StateQuant ? QuantMode::State : QuantMode::Input;
    cfg.budget.error = budgetRatioBound(c, mode) * cfg.budget.range;
    cfg.budget.deadzone = 0.25 * cfg.budget.error;
    const auto r = runScenario(cfg);
    codes += format(" %s->%d", name, r.exitCode);
    if (r.exitCode != kExitInfeasible || !r.trajectory.records.empty()) ++bad;
  }
  return {bad == 0, format("%zu gate failures; runner exit codes at the bound:%s", bad, codes.c_str())};
}

struct Criterion {
  int id;
  const char* name;
  double budgetSeconds;
  Outcome (*run)(Reference&, double);
};

constexpr Criterion kCriteria[] = {
    {1, "Bessel oracle", 1.0, besselOracle},
    {2, "Kernel limits", 1.0, kernelLimits},
    {3, "Series consistency", 10.0, seriesConsistency},
    {4, "Transform round-trip", 30.0, roundTrip},
    {5, "Norm equivalence", 30.0, normEquivalence},
    {6, "Open-loop physics", 30.0, openLoopPhysics},
    {7, "Open-loop bound", 120.0, openLoopBound},
    {8, "Quantizer properties", 60.0, quantizerProperties},
    {9, "Exact-predictor target consistency", 120.0, exactPredictor},
    {10, "State-quantized closed loop", 300.0, theorem1},
    {11, "Input-quantized closed loop", 300.0, theorem2},
    {12, "Feasibility gate", 1.0, feasibilityGate},
};

}  // namespace

bool AcceptanceSummary::allPassed() const {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

std::vector<int> AcceptanceSummary::failed() const {
  std::vector<int> ids;
  for (const auto& r : results) {
    if (!r.passed) ids.push_back(r.id);
  }
  return ids;
}

AcceptanceSummary runAcceptance(const AcceptanceOptions& options, std::ostream& out) {
  Reference ref;
  AcceptanceSummary summary;
  for (const auto& c : kCriteria) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), c.id) == options.only.end()) {
      continue;
    }
    CriterionResult r;
    r.id = c.id;
    r.name = c.name;
    r.budgetSeconds = c.budgetSeconds;
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto o = c.run(ref, options.toleranceScale);
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.seconds > r.budgetSeconds) {
      r.passed = false;
      r.detail += format(" [runtime %.2f s exceeds %.0f s]", r.seconds, r.budgetSeconds);
    }
    out << format("criterion %2d %s %-36s %8.2f s  ", r.id, r.passed ? "PASS" : "FAIL", r.name.c_str(), r.seconds)
        << r.detail << std::endl;
    summary.results.push_back(std::move(r));
  }
  const auto failed = summary.failed();
  if (failed.empty()) {
    out << "acceptance: all " << summary.results.size() << " criteria passed" << std::endl;
  } else {
    out << "acceptance: " << failed.size() << " of " << summary.results.size() << " criteria failed:";
    for (int id : failed) out << ' ' << id;
    out << std::endl;
  }
  return summary;
}

}  // namespace rdpq
