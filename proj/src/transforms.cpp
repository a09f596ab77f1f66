#include "rdpq/transforms.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rdpq/errors.hpp"
#include "rdpq/simd.hpp"

namespace rdpq {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTaylorThreshold = 1e-6;

void requireGrid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) {
    throw ConfigError(std::string(what) + ": grid mismatch (" + std::to_string(a.intervals()) + " vs " +
                      std::to_string(b.intervals()) + " intervals)");
  }
}

// y = x + s * A x
std::vector<double> applyPlus(const DenseMatrix& a, std::span<const double> x, double s) {
  std::vector<double> y(a.rows);
  simd::gemv(a.data, a.rows, a.cols, x, y);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] + s * y[i];
  return y;
}

void addProduct(const DenseMatrix& a, std::span<const double> x, double s, std::vector<double>& y) {
  std::vector<double> t(a.rows);
  simd::gemv(a.data, a.rows, a.cols, x, t);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += s * t[i];
}

DenseMatrix volterraTrapezoid(const DenseMatrix& kernel, const Grid& grid) {
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  DenseMatrix op(n, n);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double w = (j == 0 || j == i) ? 0.5 * h : h;
      op(i, j) = w * kernel(i, j);
    }
  }
  return op;
}

DenseMatrix seriesProduct(const SineSeriesKernel& series, const Grid& grid) {
  const std::size_t n = grid.size();
  DenseMatrix op(n, n);
  const auto c = series.coefficients();
  const auto r = series.rates();
  for (std::size_t m = 0; m < series.modes(); ++m) {
    const auto s = sineHatIntegrals(grid, static_cast<double>(m + 1) * kPi);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = 2.0 * c[m] * std::exp(r[m] * grid.node(i));
      if (a == 0.0) continue;
      auto row = op.row(i);
      for (std::size_t j = 0; j < n; ++j) row[j] += a * s[j];
    }
  }
  return op;
}

DenseMatrix convolutionProduct(const SineSeriesKernel& series, const Grid& grid) {
  const std::size_t n = grid.size();
  const auto cells = convolutionCellWeights(grid, series.fluxAmplitudes(), series.rates());
  DenseMatrix op(n, n);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t m = 0; m < i; ++m) {
      op(i, i - m) += cells.near[m];
      op(i, i - m - 1) += cells.far[m];
    }
  }
  return op;
}

}  // namespace

Field::Field(Grid grid, std::vector<double> samples, NormRole role)
    : grid_(std::move(grid)), samples_(std::move(samples)), role_(role) {
  if (samples_.size() != grid_.size()) {
    throw ConfigError("field has " + std::to_string(samples_.size()) + " samples, grid has " +
                      std::to_string(grid_.size()) + " nodes");
  }
  for (double s : samples_) {
    if (!std::isfinite(s)) throw DomainError("field sample is not finite");
  }
}

Field Field::zeros(const Grid& grid, NormRole role) { return Field(grid, std::vector<double>(grid.size(), 0.0), role); }

CascadePair::CascadePair(Field uField, Field vField) : u(std::move(uField)), v(std::move(vField)) {
  if (u.role() != NormRole::L2 || v.role() != NormRole::Sup) {
    throw ConfigError("cascade pair needs an L2 first component and a sup second component");
  }
  requireGrid(u.grid(), v.grid(), "CascadePair");
}

CascadePair CascadePair::zeros(const Grid& grid) {
  return {Field::zeros(grid, NormRole::L2), Field::zeros(grid, NormRole::Sup)};
}

CascadePair CascadePair::fromSamples(const Grid& grid, std::vector<double> uSamples, std::vector<double> vSamples) {
  return {Field(grid, std::move(uSamples), NormRole::L2), Field(grid, std::move(vSamples), NormRole::Sup)};
}

double l2Norm(const Grid& grid, std::span<const double> f) {
  return std::sqrt(simd::weightedSumSquares(grid.trapezoidWeights(), f));
}

double supNorm(std::span<const double> f) { return simd::maxAbs(f); }

double l2Norm(const Field& f) {
  if (f.role() != NormRole::L2) throw ConfigError("l2Norm applied to a sup-role field");
  return l2Norm(f.grid(), f.samples());
}

double supNorm(const Field& f) {
  if (f.role() != NormRole::Sup) throw ConfigError("supNorm applied to an L2-role field");
  return supNorm(f.samples());
}

double jointNorm(const CascadePair& p) { return l2Norm(p.u) + supNorm(p.v); }

std::vector<double> sineHatIntegrals(const Grid& grid, double k) {
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  const double k2h = k * k * h;
  std::vector<double> s(n);
  const double interior = 2.0 * (1.0 - std::cos(k * h)) / k2h;
  for (std::size_t j = 1; j + 1 < n; ++j) s[j] = interior * std::sin(k * grid.node(j));
  s[0] = (k * h - std::sin(k * h)) / k2h;
  s[n - 1] = (-k * h * std::cos(k) + std::sin(k) - std::sin(k * (1.0 - h))) / k2h;
  return s;
}

ConvolutionCellWeights convolutionCellWeights(const Grid& grid, std::span<const double> amplitudes,
                                              std::span<const double> rates) {
  const std::size_t cells = grid.intervals();
  const double h = grid.spacing();
  ConvolutionCellWeights out{std::vector<double>(cells, 0.0), std::vector<double>(cells, 0.0)};
  for (std::size_t mode = 0; mode < amplitudes.size(); ++mode) {
    const double b = rates[mode];
    const double bh = b * h;
    // Integrals over one cell [0, h] of e^{b s} and e^{b s} s/h.
    double i0, i1;
    if (std::fabs(bh) < kTaylorThreshold) {
      i0 = h * (1.0 + bh / 2.0);
      i1 = h * (0.5 + bh / 3.0);
    } else {
      const double em1 = std::expm1(bh);
      i0 = em1 / b;
      i1 = std::exp(bh) / b - em1 / (b * bh);
    }
    for (std::size_t m = 0; m < cells; ++m) {
      const double scale = amplitudes[mode] * std::exp(b * static_cast<double>(m) * h);
      if (scale == 0.0) break;  // the remaining cells underflow as well
      out.near[m] += scale * (i0 - i1);
      out.far[m] += scale * i1;
    }
  }
  return out;
}

TransformOperators::TransformOperators(const KernelTables& tables)
    : grid_(tables.grid), delay_(tables.plantParams.delay) {
  kOp_ = volterraTrapezoid(tables.kGrid, grid_);
  lOp_ = volterraTrapezoid(tables.lGrid, grid_);
  gammaOp_ = seriesProduct(tables.forward, grid_);
  deltaOp_ = seriesProduct(tables.inverse, grid_);
  gOp_ = convolutionProduct(tables.forward, grid_);
  pOp_ = convolutionProduct(tables.inverse, grid_);

  const std::size_t last = grid_.size() - 1;
  predU_.assign(gammaOp_.row(last).begin(), gammaOp_.row(last).end());
  predV_.resize(grid_.size());
  const auto gRow = gOp_.row(last);
  for (std::size_t j = 0; j < predV_.size(); ++j) predV_[j] = delay_ * gRow[j];
}

CascadePair directTransform(const CascadePair& pair, const TransformOperators& ops) {
  requireGrid(pair.u.grid(), ops.grid(), "directTransform");
  auto w = applyPlus(ops.volterraK(), pair.u.samples(), -1.0);
  auto z = applyPlus(ops.gOp(), pair.v.samples(), -ops.delay());
  addProduct(ops.gammaOp(), pair.u.samples(), -1.0, z);
  return CascadePair::fromSamples(ops.grid(), std::move(w), std::move(z));
}

CascadePair inverseTransform(const CascadePair& wz, const TransformOperators& ops) {
  requireGrid(wz.u.grid(), ops.grid(), "inverseTransform");
  auto u = applyPlus(ops.volterraL(), wz.u.samples(), 1.0);
  auto v = applyPlus(ops.pOp(), wz.v.samples(), ops.delay());
  addProduct(ops.deltaOp(), wz.u.samples(), 1.0, v);
  return CascadePair::fromSamples(ops.grid(), std::move(u), std::move(v));
}

CascadePair directTransform(const CascadePair& pair, const KernelTables& tables) {
  requireGrid(pair.u.grid(), tables.grid, "directTransform");
  return directTransform(pair, TransformOperators(tables));
}

CascadePair inverseTransform(const CascadePair& wz, const KernelTables& tables) {
  requireGrid(wz.u.grid(), tables.grid, "inverseTransform");
  return inverseTransform(wz, TransformOperators(tables));
}

}  // namespace rdpq
