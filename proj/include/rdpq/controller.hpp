#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rdpq/gains.hpp"
#include "rdpq/plant.hpp"
#include "rdpq/quantizers.hpp"
#include "rdpq/transforms.hpp"

namespace rdpq {

enum class ControllerMode { Exact, StateQuant, InputQuant };

/// Margin of the state-mode detection event: M*M-bar - Delta (Single) or
/// M*M-bar - 2 Delta (Double, the margin the detection-time bound uses).
enum class DetectionMargin { Single, Double };

/// Piecewise-constant zoom variable: grows by e^{2 sigma1 tau} per interval of
/// length tau until detection, is frozen for one dwell time T, then shrinks by
/// Omega per T.
class ZoomSchedule {
 public:
  ZoomSchedule(double tau, double mu0, double overshoot, double sigma1, double omega, double dwell);

  double tau() const { return tau_; }
  double mu0() const { return mu0_; }
  double omega() const { return omega_; }
  double dwell() const { return dwell_; }

  /// M-bar_1 e^{2 sigma1 (j+1) tau} mu0 with j = floor(t/tau) + 1.
  double zoomOutValue(double t) const;

  /// Freezes mu(t0) at the zoom-out value in effect at t0.
  void detect(double t0);
  bool detected() const { return t0_.has_value(); }
  double t0() const { return *t0_; }
  double muAtDetection() const { return muT0_; }

  Phase phaseAt(double t) const;

 private:
  friend double muAt(const ZoomSchedule& s, double t);
  double tau_, mu0_, overshoot_, sigma1_, omega_, dwell_;
  std::optional<double> t0_;
  double muT0_ = 0.0;
};

double muAt(const ZoomSchedule& schedule, double t);

/// ||mu q1(u/mu)||_2 + ||mu q2(v/mu)||_inf <= (M M-bar - Delta) mu (or - 2 Delta).
/// Throws ConfigError when the right-hand side is empty (M M-bar <= Delta).
bool detectT0State(const CascadePair& pair, double mu, const QuantizerSpec& spec, double mBar,
                   DetectionMargin margin = DetectionMargin::Single);

/// ||u||_2 + ||v||_inf <= (M M-bar / M3) mu on exact norms.
bool detectT0Input(const CascadePair& pair, double mu, const DesignConstants& c, const QuantizerBudget& budget);

double nominalPredictor(const CascadePair& pair, const TransformOperators& ops);
double quantizedPredictor(const CascadePair& pair, double mu, const TransformOperators& ops,
                          const QuantizerSpec& spec);

/// Stateless form of the control law given a schedule whose detection state
/// is already known.
double controlAt(double t, const CascadePair& pair, ControllerMode mode, const ZoomSchedule& schedule,
                 const TransformOperators& ops, const QuantizerSpec& spec);

/// Upper bounds on the detection time from the open-loop estimate.
double stateDetectionBound(const DesignConstants& c, const QuantizerBudget& budget, double mu0, double initialNorm);
double inputDetectionBound(const DesignConstants& c, const QuantizerBudget& budget, double mu0, double initialNorm);

struct ControllerSettings {
  ControllerMode mode = ControllerMode::StateQuant;
  double tau = 0.1;
  double mu0 = 1.0;
  DetectionMargin margin = DetectionMargin::Single;
};

/// The switched law as a state machine owned by one simulation.
class Controller final : public FeedbackLaw {
 public:
  /// `constants` must carry the budget-dependent values (withBudget) unless
  /// the mode is Exact.
  Controller(const ControllerSettings& settings, const TransformOperators& ops, const DesignConstants& constants,
             const QuantizerBudget& budget, const QuantizerSpec& spec);

  double input(const PlantState& state) override;
  double zoom() const override { return mu_; }
  Phase phase() const override { return phase_; }

  const ZoomSchedule& schedule() const { return schedule_; }
  std::optional<double> detectionTime() const;

 private:
  ControllerSettings settings_;
  const TransformOperators* ops_;
  DesignConstants constants_;
  QuantizerBudget budget_;
  QuantizerSpec spec_;
  ZoomSchedule schedule_;
  double mu_;
  Phase phase_;
  std::vector<double> v_, qu_, qv_;
};

struct BoundReport {
  bool passed = true;
  double coefficient = 0.0;
  double exponent = 0.0;
  double rate = 0.0;
  /// min over records of (1+slack) bound - lhs, relative to the bound.
  double minRelativeSlack = 0.0;
  double violationTime = -1.0;
  std::size_t records = 0;
};

/// Fills the bound column of `traj` and checks lhs <= (1 + slack) bound at every record.
BoundReport theoremBoundCheck(Trajectory& traj, const DesignConstants& c, const QuantizerBudget& budget,
                              ControllerMode mode, double tau, double mu0, double slack = 0.05);

/// Least-squares slope of log(||u||_2 + ||v||_inf) over records with t >= from.
double tailSlope(const Trajectory& traj, double from);

}  // namespace rdpq
