#include "rdpq/plant.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "rdpq/errors.hpp"
#include "rdpq/simd.hpp"

namespace rdpq {
namespace {

// Accept D/dt within this relative distance of an integer.
constexpr double kAlignTolerance = 1e-9;

std::vector<double> sampleOnGrid(const Grid& grid, const Profile& f) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(grid.node(i));
  return out;
}

}  // namespace

void PlantConfig::validate() const {
  if (intervals < 50) throw ConfigError("Nx = " + std::to_string(intervals) + " is below the minimum of 50");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(params.delay > 0.0)) throw ConfigError("delay D must be positive");
  const double k = params.delay / dt;
  if (std::fabs(k - std::round(k)) > kAlignTolerance * k || std::round(k) < 1.0) {
    throw ConfigError("D/dt = " + std::to_string(k) + " is not a positive integer");
  }
  if (delaySteps() % intervals != 0) {
    throw ConfigError("D/(dt*Nx) = " + std::to_string(k / static_cast<double>(intervals)) +
                      " is not an integer; grid nodes would fall between delay samples");
  }
}

std::size_t PlantConfig::delaySteps() const { return static_cast<std::size_t>(std::llround(params.delay / dt)); }

std::size_t PlantConfig::stepsPerInterval() const { return delaySteps() / intervals; }

PlantState::PlantState(const PlantConfig& config, const Profile& u0, const Profile& v0)
    : PlantState(config, sampleOnGrid(Grid(config.intervals), u0), v0) {}

PlantState::PlantState(const PlantConfig& config, std::vector<double> u0, const Profile& v0)
    : config_(config), grid_(config.intervals) {
  config_.validate();
  if (u0.size() != grid_.size()) throw ConfigError("u0 sample count does not match the grid");
  k_ = config_.delaySteps();
  s_ = config_.stepsPerInterval();

  ring_.assign(k_ + 1, 0.0);
  double vMax = 0.0;
  // U_m for m = -K..-1 is the initial profile at the characteristic foot 1 + m/K.
  for (std::size_t j = 0; j < k_; ++j) {
    const auto m = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(k_);
    const double val = v0(static_cast<double>(j) / static_cast<double>(k_));
    ring_[static_cast<std::size_t>((m % static_cast<std::ptrdiff_t>(k_ + 1) + static_cast<std::ptrdiff_t>(k_ + 1)) %
                                   static_cast<std::ptrdiff_t>(k_ + 1))] = val;
    vMax = std::max(vMax, std::fabs(val));
  }
  lastInput_ = v0(1.0);
  vMax = std::max(vMax, std::fabs(lastInput_));

  u_ = std::move(u0);
  u_.front() = 0.0;
  u_.back() = delayedInput();
  for (double x : u_) {
    if (!std::isfinite(x)) throw DomainError("initial state is not finite");
  }
  initialNorm_ = l2Norm(grid_, u_) + vMax;
  factor();
}

void PlantState::factor() {
  const double h = grid_.spacing();
  const double dt = config_.dt;
  const double r = dt / (h * h);
  const double ld = config_.params.lambda * dt;
  center_ = 1.0 - r + 0.5 * ld;
  side_ = 0.5 * r;
  offDiag_ = -0.5 * r;
  const double diag = 1.0 + r - 0.5 * ld;
  const std::size_t n = grid_.intervals() - 1;
  cPrime_.resize(n);
  invDen_.resize(n);
  rhs_.resize(n);
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double den = diag - offDiag_ * prev;
    invDen_[i] = 1.0 / den;
    prev = offDiag_ * invDen_[i];
    cPrime_[i] = prev;
  }
}

double PlantState::inputAt(std::ptrdiff_t m) const {
  const auto len = static_cast<std::ptrdiff_t>(ring_.size());
  return ring_[static_cast<std::size_t>(((m % len) + len) % len)];
}

void PlantState::vField(std::span<double> out) const {
  const std::size_t nx = grid_.intervals();
  const std::size_t len = ring_.size();
  // Node i reads U_{n - s (Nx - i)}: start at n - K and walk the ring in strides of s.
  std::size_t idx = (step_ + len - k_ % len) % len;
  for (std::size_t i = 0; i < nx; ++i) {
    out[i] = ring_[idx];
    idx += s_;
    if (idx >= len) idx -= len;
  }
  out[nx] = lastInput_;
}

std::vector<double> PlantState::vField() const {
  std::vector<double> v(grid_.size());
  vField(v);
  return v;
}

CascadePair PlantState::pair() const { return CascadePair::fromSamples(grid_, u_, vField()); }

void PlantState::stepCN(double input) {
  const auto n = static_cast<std::ptrdiff_t>(step_);
  const auto len = static_cast<std::ptrdiff_t>(ring_.size());
  ring_[static_cast<std::size_t>(((n % len) + len) % len)] = input;
  const double bNext = inputAt(n + 1 - static_cast<std::ptrdiff_t>(k_));

  const std::size_t m = rhs_.size();
  simd::stencil3(u_, rhs_, center_, side_);
  rhs_[m - 1] += side_ * bNext;

  // Thomas sweep; both off-diagonals equal offDiag_.
  rhs_[0] *= invDen_[0];
  for (std::size_t i = 1; i < m; ++i) rhs_[i] = (rhs_[i] - offDiag_ * rhs_[i - 1]) * invDen_[i];
  for (std::size_t i = m - 1; i-- > 0;) rhs_[i] -= cPrime_[i] * rhs_[i + 1];

  std::copy(rhs_.begin(), rhs_.end(), u_.begin() + 1);
  u_.back() = bNext;
  lastInput_ = input;
  ++step_;
}

std::string_view phaseName(Phase p) {
  switch (p) {
    case Phase::OpenLoop: return "open-loop";
    case Phase::ZoomOut: return "zoom-out";
    case Phase::Dwell: return "dwell";
    case Phase::Exact: return "exact";
  }
  return "unknown";
}

Trajectory simulate(PlantState& state, FeedbackLaw& law, double horizon, std::size_t stride,
                    const StepObserver& observer) {
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (stride == 0) throw ConfigError("output stride must be positive");
  const auto steps = static_cast<std::size_t>(std::llround(horizon / state.config().dt));
  Trajectory traj;
  traj.initialNorm = state.initialNorm();
  traj.records.reserve(steps / stride + 2);
  std::vector<double> v(state.grid().size());
  for (std::size_t n = 0;; ++n) {
    const double input = law.input(state);
    if (n % stride == 0 || n == steps) {
      state.vField(v);
      traj.records.push_back(
          {state.time(), l2Norm(state.grid(), state.u()), supNorm(v), law.zoom(), input, law.phase()});
    }
    if (observer) observer(state, input);
    if (n == steps) break;
    state.stepCN(input);
  }
  return traj;
}

OpenLoopReport openLoopBoundCheck(PlantState state, double horizon, std::size_t stride, double overshoot,
                                  double sigma1, double slack) {
  ZeroInput zero;
  const auto traj = simulate(state, zero, horizon, stride);
  OpenLoopReport rep;
  const double norm0 = traj.initialNorm;
  for (const auto& r : traj.records) {
    ++rep.records;
    const double lhs = r.l2u + r.supv;
    const double rhs = overshoot * std::exp(sigma1 * r.t) * norm0;
    const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (ratio > rep.worstRatio) {
      rep.worstRatio = ratio;
      rep.worstTime = r.t;
    }
  }
  rep.passed = rep.worstRatio <= 1.0 + slack;
  return rep;
}

void writeCsv(std::ostream& out, const Trajectory& traj) {
  out << "t,l2_u,sup_v,mu,U,phase,bound\n";
  char buf[512];
  for (const auto& r : traj.records) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%s,%.17g\n", r.t, r.l2u, r.supv, r.mu, r.input,
                  std::string(phaseName(r.phase)).c_str(), r.bound);
    out << buf;
  }
}

}  // namespace rdpq
