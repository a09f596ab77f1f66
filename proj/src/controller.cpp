#include "rdpq/controller.hpp"

#include <cmath>
#include <limits>

#include "rdpq/errors.hpp"
#include "rdpq/simd.hpp"

namespace rdpq {
namespace {

double detectionThreshold(const QuantizerSpec& spec, double mBar, DetectionMargin margin) {
  const double reserve = margin == DetectionMargin::Single ? spec.error : 2.0 * spec.error;
  const double thr = spec.range * mBar - reserve;
  if (!(thr > 0.0)) {
    throw ConfigError("detection set is empty: M * M-bar = " + std::to_string(spec.range * mBar) +
                      " does not exceed the reserved quantization error " + std::to_string(reserve));
  }
  return thr;
}

double predictor(std::span<const double> u, std::span<const double> v, const TransformOperators& ops) {
  return simd::dot(ops.predictorStateWeights(), u) + simd::dot(ops.predictorActuatorWeights(), v);
}

}  // namespace

ZoomSchedule::ZoomSchedule(double tau, double mu0, double overshoot, double sigma1, double omega, double dwell)
    : tau_(tau), mu0_(mu0), overshoot_(overshoot), sigma1_(sigma1), omega_(omega), dwell_(dwell) {
  if (!(tau > 0.0 && mu0 > 0.0)) throw ParameterError("tau and mu0 must be positive");
}

double ZoomSchedule::zoomOutValue(double t) const {
  const double j = std::floor(t / tau_) + 1.0;
  return overshoot_ * std::exp(2.0 * sigma1_ * (j + 1.0) * tau_) * mu0_;
}

void ZoomSchedule::detect(double t0) {
  if (t0_) return;
  muT0_ = zoomOutValue(t0);
  t0_ = t0;
}

Phase ZoomSchedule::phaseAt(double t) const { return (t0_ && t >= *t0_) ? Phase::Dwell : Phase::ZoomOut; }

double muAt(const ZoomSchedule& s, double t) {
  if (t < 0.0) throw DomainError("muAt needs t >= 0");
  if (!s.t0_ || t < *s.t0_) return s.zoomOutValue(t);
  const auto i = static_cast<long long>(std::floor((t - *s.t0_) / s.dwell_)) + 1;
  double mu = s.muT0_;
  for (long long k = 1; k < i; ++k) mu *= s.omega_;
  return mu;
}

bool detectT0State(const CascadePair& pair, double mu, const QuantizerSpec& spec, double mBar,
                   DetectionMargin margin) {
  const double thr = detectionThreshold(spec, mBar, margin);
  const auto q = zoomQuantizePair(pair, mu, spec);
  return jointNorm(q) <= thr * mu;
}

bool detectT0Input(const CascadePair& pair, double mu, const DesignConstants& c, const QuantizerBudget& budget) {
  return jointNorm(pair) <= budget.range * c.mBar / c.m3 * mu;
}

double nominalPredictor(const CascadePair& pair, const TransformOperators& ops) {
  if (!(pair.u.grid() == ops.grid())) throw ConfigError("nominalPredictor: grid mismatch");
  return predictor(pair.u.samples(), pair.v.samples(), ops);
}

double quantizedPredictor(const CascadePair& pair, double mu, const TransformOperators& ops,
                          const QuantizerSpec& spec) {
  return nominalPredictor(zoomQuantizePair(pair, mu, spec), ops);
}

double controlAt(double t, const CascadePair& pair, ControllerMode mode, const ZoomSchedule& schedule,
                 const TransformOperators& ops, const QuantizerSpec& spec) {
  if (mode == ControllerMode::Exact) return nominalPredictor(pair, ops);
  if (!schedule.detected() || t < schedule.t0()) return 0.0;
  const double mu = muAt(schedule, t);
  if (mode == ControllerMode::StateQuant) return quantizedPredictor(pair, mu, ops, spec);
  return inputQuantize(nominalPredictor(pair, ops), mu, spec);
}

double stateDetectionBound(const DesignConstants& c, const QuantizerBudget& budget, double mu0, double initialNorm) {
  const double gap = budget.range * c.mBar - 2.0 * budget.error;
  if (initialNorm <= 0.0) return 0.0;
  return std::max(0.0, std::log(initialNorm / (mu0 * gap)) / c.spectral.sigma1);
}

double inputDetectionBound(const DesignConstants& c, const QuantizerBudget& budget, double mu0, double initialNorm) {
  if (initialNorm <= 0.0) return 0.0;
  return std::max(0.0, std::log(c.m3 * initialNorm / (mu0 * budget.range * c.mBar)) / c.spectral.sigma1);
}

Controller::Controller(const ControllerSettings& settings, const TransformOperators& ops,
                       const DesignConstants& constants, const QuantizerBudget& budget, const QuantizerSpec& spec)
    : settings_(settings),
      ops_(&ops),
      constants_(constants),
      budget_(budget),
      spec_(spec),
      schedule_(settings.tau, settings.mu0, constants.spectral.overshoot, constants.spectral.sigma1, constants.omega,
                constants.dwell),
      mu_(std::numeric_limits<double>::quiet_NaN()),
      phase_(settings.mode == ControllerMode::Exact ? Phase::Exact : Phase::ZoomOut),
      v_(ops.grid().size()),
      qu_(ops.grid().size()),
      qv_(ops.grid().size()) {
  if (settings.mode != ControllerMode::Exact) {
    if (std::isnan(constants.omega)) throw ConfigError("quantized controller needs budget-dependent constants");
    if (settings.mode == ControllerMode::StateQuant) detectionThreshold(spec, constants.mBar, settings.margin);
  }
}

std::optional<double> Controller::detectionTime() const {
  if (!schedule_.detected()) return std::nullopt;
  return schedule_.t0();
}

double Controller::input(const PlantState& state) {
  const double t = state.time();
  const auto& grid = ops_->grid();
  state.vField(v_);
  const auto u = state.u();
  if (settings_.mode == ControllerMode::Exact) return predictor(u, v_, *ops_);

  if (!schedule_.detected()) {
    mu_ = schedule_.zoomOutValue(t);
    phase_ = Phase::ZoomOut;
    bool hit;
    if (settings_.mode == ControllerMode::StateQuant) {
      zoomQuantizeSamples(grid, u, v_, mu_, spec_, qu_, qv_);
      const double thr = detectionThreshold(spec_, constants_.mBar, settings_.margin);
      hit = l2Norm(grid, qu_) + supNorm(qv_) <= thr * mu_;
    } else {
      hit = l2Norm(grid, u) + supNorm(v_) <= budget_.range * constants_.mBar / constants_.m3 * mu_;
    }
    if (!hit) return 0.0;
    schedule_.detect(t);
  }
  mu_ = muAt(schedule_, t);
  phase_ = Phase::Dwell;
  if (settings_.mode == ControllerMode::StateQuant) {
    zoomQuantizeSamples(grid, u, v_, mu_, spec_, qu_, qv_);
    return predictor(qu_, qv_, *ops_);
  }
  return inputQuantize(predictor(u, v_, *ops_), mu_, spec_);
}

BoundReport theoremBoundCheck(Trajectory& traj, const DesignConstants& c, const QuantizerBudget& budget,
                              ControllerMode mode, double tau, double mu0, double slack) {
  if (mode == ControllerMode::Exact) throw ConfigError("theoremBoundCheck applies to the quantized modes");
  const auto qm = mode == ControllerMode::StateQuant ? QuantMode::State : QuantMode::Input;
  BoundReport rep;
  rep.rate = c.overallRate;
  rep.exponent = 2.0 - c.overallRate / c.spectral.sigma1;
  rep.coefficient = theoremGamma(c, budget, tau, mu0, qm);
  rep.minRelativeSlack = std::numeric_limits<double>::infinity();
  const double scale = rep.coefficient * std::pow(traj.initialNorm, rep.exponent);
  for (auto& r : traj.records) {
    ++rep.records;
    r.bound = scale * std::exp(rep.rate * r.t);
    const double lhs = r.l2u + r.supv;
    const double allowed = (1.0 + slack) * r.bound;
    const double rel = r.bound > 0.0 ? (allowed - lhs) / r.bound : (lhs > 0.0 ? -1.0 : 0.0);
    if (rel < rep.minRelativeSlack) rep.minRelativeSlack = rel;
    if (lhs > allowed && rep.passed) {
      rep.passed = false;
      rep.violationTime = r.t;
    }
  }
  return rep;
}

double tailSlope(const Trajectory& traj, double from) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : traj.records) {
    const double y = r.l2u + r.supv;
    if (r.t < from || !(y > 0.0)) continue;
    const double ly = std::log(y);
    n += 1;
    sx += r.t;
    sy += ly;
    sxx += r.t * r.t;
    sxy += r.t * ly;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace rdpq
