#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "rdpq/controller.hpp"
#include "rdpq/errors.hpp"

using namespace rdpq;
using std::numbers::pi;

namespace {

const PlantParams kRef{11.0, 0.1};
const QuantizerBudget kBudget{1.0, 1.9e-6, 4.75e-7};

struct Reference {
  KernelTables tables = buildTables(Grid(200), kRef, SeriesTruncation{});
  TransformOperators ops{tables};
  DesignConstants constants = withBudget(computeDesignConstants(tables), kBudget);
  QuantizerSpec spec = QuantizerSpec::fromBudget(kBudget);
};

const Reference& ref() {
  static const Reference r;
  return r;
}

template <class F>
double simpson(F f, std::size_t panels) {
  const double h = 1.0 / static_cast<double>(panels);
  double s = f(0.0) + f(1.0);
  for (std::size_t i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(static_cast<double>(i) * h);
  return s * h / 3.0;
}

double uProfile(double x) { return std::sin(pi * x) - 0.3 * std::sin(2.0 * pi * x); }
double vProfile(double x) { return 0.5 - 0.4 * x * x; }

CascadePair smoothPair(double scale) {
  const Grid grid(200);
  std::vector<double> u(grid.size()), v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    u[i] = scale * uProfile(grid.node(i));
    v[i] = scale * vProfile(grid.node(i));
  }
  return CascadePair::fromSamples(grid, u, v);
}

ZoomSchedule refSchedule() {
  const auto& c = ref().constants;
  return ZoomSchedule(0.1, 1.0, c.spectral.overshoot, c.spectral.sigma1, c.omega, c.dwell);
}

}  // namespace

TEST_CASE("zoom-out schedule") {
  const auto s = refSchedule();
  const auto& c = ref().constants;
  const double first = c.spectral.overshoot * std::exp(4.0 * c.spectral.sigma1 * 0.1);
  CHECK(muAt(s, 0.0) == doctest::Approx(first).epsilon(1e-14));
  CHECK(muAt(s, 0.0999) == muAt(s, 0.0));
  CHECK(std::abs(first - 19.15) <= 0.01);
  CHECK(muAt(s, 0.1) == doctest::Approx(first * std::exp(2.0 * c.spectral.sigma1 * 0.1)).epsilon(1e-14));
  CHECK(s.phaseAt(5.0) == Phase::ZoomOut);
  CHECK_THROWS_AS(muAt(s, -1.0), DomainError);
  CHECK_THROWS_AS(ZoomSchedule(0.0, 1.0, 1.0, 1.0, 0.5, 1.0), ParameterError);
}

TEST_CASE("zoom-in schedule contracts by Omega per dwell") {
  auto s = refSchedule();
  s.detect(3.1);
  const double mu0 = s.muAtDetection();
  CHECK(mu0 == s.zoomOutValue(3.1));
  const double T = s.dwell();
  CHECK(muAt(s, 3.1) == mu0);
  CHECK(muAt(s, 3.1 + 0.5 * T) == mu0);
  CHECK(muAt(s, 3.1 + 1.5 * T) == doctest::Approx(s.omega() * mu0).epsilon(1e-15));
  CHECK(muAt(s, 3.1 + 3.5 * T) == doctest::Approx(std::pow(s.omega(), 3) * mu0).epsilon(1e-14));
  CHECK(s.phaseAt(3.0) == Phase::ZoomOut);
  CHECK(s.phaseAt(3.2) == Phase::Dwell);
  s.detect(10.0);  // later detections are ignored
  CHECK(s.t0() == 3.1);
}

TEST_CASE("state detection event") {
  const auto& r = ref();
  CHECK(detectT0State(CascadePair::zeros(Grid(200)), 1.0, r.spec, r.constants.mBar));
  CHECK(detectT0State(CascadePair::zeros(Grid(200)), 1e-9, r.spec, r.constants.mBar, DetectionMargin::Double));

  // Any pair with joint norm <= (M M-bar - 2 Delta) mu is detected.
  const auto p = smoothPair(1.0);
  const double norm = jointNorm(p);
  const double mu = norm / (r.constants.mBar - 2.0 * kBudget.error);
  CHECK(detectT0State(p, mu * (1.0 + 1e-9), r.spec, r.constants.mBar));
  CHECK_FALSE(detectT0State(p, 0.5 * mu, r.spec, r.constants.mBar));

  QuantizerSpec big = r.spec;
  big.error = 1.0;
  CHECK_THROWS_AS(detectT0State(p, 1.0, big, r.constants.mBar), ConfigError);
}

TEST_CASE("input detection event") {
  const auto& r = ref();
  CHECK(detectT0Input(CascadePair::zeros(Grid(200)), 1.0, r.constants, kBudget));
  const auto p = smoothPair(1.0);
  const double mu = jointNorm(p) * r.constants.m3 / r.constants.mBar;
  CHECK(detectT0Input(p, mu * (1.0 + 1e-12), r.constants, kBudget));
  CHECK_FALSE(detectT0Input(p, mu * 0.99, r.constants, kBudget));
}

TEST_CASE("nominal predictor against an independent quadrature") {
  const auto& r = ref();
  CHECK(nominalPredictor(CascadePair::zeros(Grid(200)), r.ops) == 0.0);
  const auto& t = r.tables;
  const SeriesTruncation tr;
  const double oracle =
      simpson([&](double y) { return kernelGamma(1.0, y, kRef, t.sineCoeffsK, tr) * uProfile(y); }, 20'000) +
      kRef.delay * simpson([&](double y) { return kernelG(1.0, y, kRef, t.sineCoeffsK, tr) * vProfile(y); }, 20'000);
  CHECK(nominalPredictor(smoothPair(1.0), r.ops) == doctest::Approx(oracle).epsilon(1e-3));
  // The predictor is the x = 1 value of v - z.
  const auto p = smoothPair(1.0);
  const auto wz = directTransform(p, r.ops);
  CHECK(nominalPredictor(p, r.ops) == doctest::Approx(p.v[200] - wz.v[200]).epsilon(1e-10));
  CHECK_THROWS_AS(nominalPredictor(CascadePair::zeros(Grid(100)), r.ops), ConfigError);
}

TEST_CASE("quantized predictor") {
  const auto& r = ref();
  const auto p = smoothPair(1e-7);
  CHECK(jointNorm(p) <= kBudget.deadzone * 1.0);
  CHECK(quantizedPredictor(p, 1.0, r.ops, r.spec) == 0.0);

  // Quantization moves the predictor by at most about M3 Delta mu.
  const auto big = smoothPair(0.4);
  for (double mu : {1.0, 3.0}) {
    const double diff = std::abs(quantizedPredictor(big, mu, r.ops, r.spec) - nominalPredictor(big, r.ops));
    CHECK(diff <= 1.05 * r.constants.m3 * kBudget.error * mu);
  }
}

TEST_CASE("control law branches") {
  const auto& r = ref();
  const auto p = smoothPair(1.0);
  auto s = refSchedule();
  CHECK(controlAt(1.0, p, ControllerMode::StateQuant, s, r.ops, r.spec) == 0.0);
  CHECK(controlAt(1.0, p, ControllerMode::InputQuant, s, r.ops, r.spec) == 0.0);
  CHECK(controlAt(1.0, p, ControllerMode::Exact, s, r.ops, r.spec) == nominalPredictor(p, r.ops));
  s.detect(0.5);
  CHECK(controlAt(0.4, p, ControllerMode::StateQuant, s, r.ops, r.spec) == 0.0);
  const double mu = muAt(s, 1.0);
  CHECK(controlAt(1.0, p, ControllerMode::StateQuant, s, r.ops, r.spec) == quantizedPredictor(p, mu, r.ops, r.spec));
  CHECK(controlAt(1.0, p, ControllerMode::InputQuant, s, r.ops, r.spec) ==
        inputQuantize(nominalPredictor(p, r.ops), mu, r.spec));
  // Small nominal input inside the deadzone.
  const auto tiny = smoothPair(1e-12);
  CHECK(controlAt(1.0, tiny, ControllerMode::InputQuant, s, r.ops, r.spec) == 0.0);
}

TEST_CASE("detection time bounds") {
  const auto& c = ref().constants;
  CHECK(stateDetectionBound(c, kBudget, 1.0, 0.0) == 0.0);
  const double norm = 2.0;
  const double tb = stateDetectionBound(c, kBudget, 1.0, norm);
  CHECK(tb == doctest::Approx(std::log(norm / (c.mBar - 2.0 * kBudget.error)) / c.spectral.sigma1));
  CHECK(inputDetectionBound(c, kBudget, 1.0, norm) > 0.0);
  CHECK(stateDetectionBound(c, kBudget, 1.0, norm) > stateDetectionBound(c, kBudget, 10.0, norm));
}

TEST_CASE("quantized controller replays bit-for-bit") {
  const auto& r = ref();
  PlantConfig pc;
  pc.params = kRef;
  auto run = [&] {
    PlantState state(pc, [](double x) { return 1e-3 * uProfile(x); }, [](double x) { return 1e-3 * vProfile(x); });
    ControllerSettings settings;
    settings.mode = ControllerMode::StateQuant;
    Controller law(settings, r.ops, r.constants, kBudget, r.spec);
    std::vector<double> inputs;
    simulate(state, law, 0.3, 1000, [&](const PlantState&, double u) { inputs.push_back(u); });
    return std::pair{inputs, law.detectionTime()};
  };
  const auto a = run();
  const auto b = run();
  REQUIRE(a.second.has_value());
  CHECK(*a.second == *b.second);
  CHECK(a.first == b.first);
  bool nonzero = false;
  for (double u : a.first) nonzero = nonzero || u != 0.0;
  CHECK(nonzero);
}

TEST_CASE("quantized controller needs budget-dependent constants") {
  const auto& r = ref();
  ControllerSettings settings;
  CHECK_THROWS_AS(Controller(settings, r.ops, computeDesignConstants(r.tables), kBudget, r.spec), ConfigError);
  settings.mode = ControllerMode::Exact;
  Controller exact(settings, r.ops, computeDesignConstants(r.tables), kBudget, r.spec);
  CHECK(exact.phase() == Phase::Exact);
}

TEST_CASE("theorem bound check") {
  const auto& r = ref();
  Trajectory zero;
  zero.initialNorm = 0.0;
  for (double t : {0.0, 1.0, 2.0}) zero.records.push_back({t, 0.0, 0.0, 1.0, 0.0, Phase::ZoomOut});
  const auto rep = theoremBoundCheck(zero, r.constants, kBudget, ControllerMode::StateQuant, 0.1, 1.0);
  CHECK(rep.passed);
  CHECK(rep.records == 3);

  Trajectory blowup;
  blowup.initialNorm = 1.0;
  blowup.records.push_back({0.0, 0.5, 0.5, 1.0, 0.0, Phase::ZoomOut});
  blowup.records.push_back({1e6, 1.0, 0.0, 1.0, 0.0, Phase::Dwell});
  const auto bad = theoremBoundCheck(blowup, r.constants, kBudget, ControllerMode::StateQuant, 0.1, 1.0);
  CHECK_FALSE(bad.passed);
  CHECK(bad.violationTime == 1e6);
  CHECK(std::isfinite(blowup.records[0].bound));
  CHECK(bad.exponent == doctest::Approx(2.0 - r.constants.overallRate / r.constants.spectral.sigma1));
  CHECK_THROWS_AS(theoremBoundCheck(zero, r.constants, kBudget, ControllerMode::Exact, 0.1, 1.0), ConfigError);
}

TEST_CASE("tail slope of an exact exponential") {
  Trajectory traj;
  for (int k = 0; k <= 50; ++k) {
    const double t = 0.1 * k;
    traj.records.push_back({t, std::exp(-0.7 * t), 0.0, 1.0, 0.0, Phase::Dwell});
  }
  CHECK(tailSlope(traj, 0.0) == doctest::Approx(-0.7).epsilon(1e-12));
  CHECK(tailSlope(traj, 2.0) == doctest::Approx(-0.7).epsilon(1e-12));
  CHECK(std::isnan(tailSlope(traj, 100.0)));
}
