#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rdpq/grid.hpp"
#include "rdpq/params.hpp"
#include "rdpq/transforms.hpp"

namespace rdpq {

struct PlantConfig {
  PlantParams params;
  std::size_t intervals = 200;  // Nx
  double dt = 1e-4;

  /// Nx >= 50, dt > 0, D/dt = K and K/Nx integers. Throws ConfigError.
  void validate() const;
  std::size_t delaySteps() const;      // K
  std::size_t stepsPerInterval() const;  // K / Nx
};

using Profile = std::function<double(double)>;

/// Reaction-diffusion field plus the transport state, the latter kept as the
/// history of boundary inputs: v(t, x) = U(t - D(1 - x)).
class PlantState {
 public:
  /// u0 is sampled at the grid nodes (u0(0) is forced to 0); v0 is sampled at
  /// the K+1 characteristic feet x = m/K.
  PlantState(const PlantConfig& config, const Profile& u0, const Profile& v0);
  PlantState(const PlantConfig& config, std::vector<double> u0, const Profile& v0);

  const PlantConfig& config() const { return config_; }
  const Grid& grid() const { return grid_; }
  double time() const { return static_cast<double>(step_) * config_.dt; }
  std::size_t stepIndex() const { return step_; }
  std::span<const double> u() const { return u_; }

  /// v(t, x_i) on the grid. The x = 1 node holds the most recently applied input.
  void vField(std::span<double> out) const;
  std::vector<double> vField() const;
  CascadePair pair() const;

  /// Input applied D ago, i.e. v(t, 0) = u(t, 1).
  double delayedInput() const { return inputAt(static_cast<std::ptrdiff_t>(step_) - static_cast<std::ptrdiff_t>(k_)); }

  /// One Crank-Nicolson step of length dt with U(t) = input.
  void stepCN(double input);

  /// ||u0||_2 + sup |v0| over every sampled foot.
  double initialNorm() const { return initialNorm_; }

 private:
  double inputAt(std::ptrdiff_t m) const;
  void factor();

  PlantConfig config_;
  Grid grid_;
  std::size_t k_, s_;
  std::size_t step_ = 0;
  std::vector<double> u_;
  std::vector<double> ring_;
  double lastInput_;
  double initialNorm_;
  // Crank-Nicolson coefficients and the Thomas factorization.
  double center_, side_, offDiag_;
  std::vector<double> cPrime_, invDen_, rhs_;
};

enum class Phase { OpenLoop, ZoomOut, Dwell, Exact };
std::string_view phaseName(Phase p);

struct TrajectoryRecord {
  double t;
  double l2u;
  double supv;
  double mu;
  double input;
  Phase phase;
  double bound = std::numeric_limits<double>::quiet_NaN();
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  double initialNorm = 0.0;
};

/// Anything that picks U(t) from the current plant state.
class FeedbackLaw {
 public:
  virtual ~FeedbackLaw() = default;
  virtual double input(const PlantState& state) = 0;
  virtual double zoom() const { return std::numeric_limits<double>::quiet_NaN(); }
  virtual Phase phase() const = 0;
};

class ZeroInput final : public FeedbackLaw {
 public:
  double input(const PlantState&) override { return 0.0; }
  Phase phase() const override { return Phase::OpenLoop; }
};

/// Called after the input for step n is chosen and before the step is taken.
using StepObserver = std::function<void(const PlantState& state, double input)>;

/// Steps to round(horizon/dt), recording every `stride` steps and at the end.
Trajectory simulate(PlantState& state, FeedbackLaw& law, double horizon, std::size_t stride,
                    const StepObserver& observer = {});

struct OpenLoopReport {
  bool passed = true;
  double worstRatio = 0.0;
  double worstTime = 0.0;
  std::size_t records = 0;
};

/// Runs with U = 0 and checks ||u||_2 + ||v||_inf <= overshoot e^{sigma1 t} (||u0|| + ||v0||) (1 + slack).
OpenLoopReport openLoopBoundCheck(PlantState state, double horizon, std::size_t stride, double overshoot,
                                  double sigma1, double slack = 0.05);

void writeCsv(std::ostream& out, const Trajectory& traj);

}  // namespace rdpq
