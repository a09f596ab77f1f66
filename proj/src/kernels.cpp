#include "rdpq/kernels.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rdpq/bessel.hpp"
#include "rdpq/errors.hpp"

namespace rdpq {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTriangleSlack = 1e-12;
// Below this value of lambda (x^2 - y^2) the ratio I1(z)/z (J1(z)/z) is replaced
// by its limit 1/2.
constexpr double kDiagonalThreshold = 1e-12;

void checkTriangle(double x, double y, const char* name) {
  if (!(y >= -kTriangleSlack && y <= x + kTriangleSlack && x <= 1.0 + kTriangleSlack)) {
    throw DomainError(std::string(name) + ": (" + std::to_string(x) + ", " + std::to_string(y) +
                      ") is outside 0 <= y <= x <= 1");
  }
}

template <class Bessel>
double besselKernel(double x, double y, double lambda, Bessel bessel, const char* name) {
  checkTriangle(x, y, name);
  if (!(lambda > 0.0)) throw DomainError(std::string(name) + ": lambda must be positive");
  const double arg = lambda * (x * x - y * y);
  if (arg < kDiagonalThreshold) return -0.5 * lambda * x;
  const double z = std::sqrt(arg);
  return -lambda * y * bessel(z) / z;
}

std::span<const double> leading(std::span<const double> coeffs, const SeriesTruncation& truncation) {
  if (coeffs.size() < truncation.modeCount) {
    throw ConfigError("series needs " + std::to_string(truncation.modeCount) + " coefficients, got " +
                      std::to_string(coeffs.size()));
  }
  return coeffs.first(truncation.modeCount);
}

SineSeriesKernel makeSeries(const PlantParams& params, std::span<const double> coeffs,
                            const SeriesTruncation& truncation, bool forward) {
  truncation.validate();
  params.checkSeries(truncation.modeCount);
  const auto c = leading(coeffs, truncation);
  return SineSeriesKernel({c.begin(), c.end()}, forward ? params.lambda : 0.0, params.delay);
}

// Same sum as SineSeriesKernel::value with the sine and exponential factors
// tabulated once per node.
void fillSeriesTable(const SineSeriesKernel& series, const Grid& grid, DenseMatrix& out) {
  const std::size_t n = grid.size();
  const auto c = series.coefficients();
  const auto r = series.rates();
  std::vector<double> sines(n);
  for (std::size_t m = 0; m < series.modes(); ++m) {
    for (std::size_t j = 0; j < n; ++j) sines[j] = std::sin(static_cast<double>(m + 1) * kPi * grid.node(j));
    for (std::size_t i = 0; i < n; ++i) {
      const double a = 2.0 * c[m] * std::exp(r[m] * grid.node(i));
      auto row = out.row(i);
      for (std::size_t j = 0; j < n; ++j) row[j] += a * sines[j];
    }
  }
}

}  // namespace

std::size_t resonantMode(double lambda) {
  const double n = std::round(std::sqrt(std::max(lambda, 0.0)) / kPi);
  for (double m : {n - 1.0, n, n + 1.0}) {
    if (m >= 1.0 && std::fabs(lambda - m * m * kPi * kPi) <= kResonanceTolerance) return static_cast<std::size_t>(m);
  }
  return 0;
}

void PlantParams::checkSeries(std::size_t modes) const {
  if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
  if (!(delay > 0.0)) throw ParameterError("delay D must be positive");
  if (const auto n = resonantMode(lambda); n != 0 && n <= modes) {
    throw ParameterError("lambda = " + std::to_string(lambda) + " resonates with mode n = " + std::to_string(n) +
                         " (lambda = n^2 pi^2)");
  }
}

void PlantParams::checkUnstable() const {
  checkSeries(static_cast<std::size_t>(-1));
  if (!(lambda > kPi * kPi)) {
    throw ParameterError("lambda = " + std::to_string(lambda) + " does not exceed pi^2; the open loop is not unstable");
  }
}

void SeriesTruncation::validate() const {
  if (modeCount < 1) throw ConfigError("modeCount must be at least 1");
  if (quadraturePoints < 20 * modeCount) {
    throw ConfigError("quadraturePoints = " + std::to_string(quadraturePoints) + " cannot resolve " +
                      std::to_string(modeCount) + " modes (need >= 20 per mode)");
  }
}

double kernelK(double x, double y, double lambda) { return besselKernel(x, y, lambda, besselI1, "kernelK"); }

double kernelL(double x, double y, double lambda) { return besselKernel(x, y, lambda, besselJ1, "kernelL"); }

std::vector<double> sineCoefficients(std::span<const double> trace, std::size_t modes) {
  const std::size_t q = trace.size();
  if (q < 3 || q % 2 == 0) throw ConfigError("Simpson quadrature needs an odd sample count >= 3");
  if (q < 20 * modes) {
    throw ConfigError(std::to_string(modes) + " modes exceed the resolvable count for " + std::to_string(q) +
                      " samples");
  }
  const double h = 1.0 / static_cast<double>(q - 1);
  std::vector<double> weighted(q);
  for (std::size_t j = 0; j < q; ++j) {
    const double w = (j == 0 || j == q - 1) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    weighted[j] = w * h / 3.0 * trace[j];
  }
  std::vector<double> c(modes, 0.0);
  for (std::size_t n = 1; n <= modes; ++n) {
    double s = 0.0;
    for (std::size_t j = 1; j + 1 < q; ++j) {
      s += weighted[j] * std::sin(static_cast<double>(n) * kPi * static_cast<double>(j) * h);
    }
    c[n - 1] = s;
  }
  return c;
}

SineSeriesKernel::SineSeriesKernel(std::vector<double> coeffs, double reaction, double delay)
    : coeffs_(std::move(coeffs)), rates_(coeffs_.size()), flux_(coeffs_.size()) {
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    rates_[i] = delay * (reaction - n * n * kPi * kPi);
    const double parity = (i % 2 == 0) ? -1.0 : 1.0;  // (-1)^n
    flux_[i] = -2.0 * n * kPi * parity * coeffs_[i];
  }
}

double SineSeriesKernel::value(double x, double y) const {
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    s += coeffs_[i] * std::exp(rates_[i] * x) * std::sin(static_cast<double>(i + 1) * kPi * y);
  }
  return 2.0 * s;
}

double SineSeriesKernel::flux(double s) const {
  double f = 0.0;
  for (std::size_t i = 0; i < flux_.size(); ++i) f += flux_[i] * std::exp(rates_[i] * s);
  return f;
}

double kernelGamma(double x, double y, const PlantParams& params, std::span<const double> coeffs,
                   const SeriesTruncation& truncation) {
  return makeSeries(params, coeffs, truncation, true).value(x, y);
}

double kernelG(double x, double y, const PlantParams& params, std::span<const double> coeffs,
               const SeriesTruncation& truncation) {
  checkTriangle(x, y, "kernelG");
  return makeSeries(params, coeffs, truncation, true).flux(std::max(x - y, 0.0));
}

double kernelDelta(double x, double y, const PlantParams& params, std::span<const double> coeffs,
                   const SeriesTruncation& truncation) {
  return makeSeries(params, coeffs, truncation, false).value(x, y);
}

double kernelP(double x, double y, const PlantParams& params, std::span<const double> coeffs,
               const SeriesTruncation& truncation) {
  checkTriangle(x, y, "kernelP");
  return makeSeries(params, coeffs, truncation, false).flux(std::max(x - y, 0.0));
}

std::vector<double> sampleBoundaryTrace(double lambda, std::size_t count, bool inverse) {
  std::vector<double> trace(count);
  const double h = 1.0 / static_cast<double>(count - 1);
  for (std::size_t j = 0; j < count; ++j) {
    const double z = static_cast<double>(j) * h;
    trace[j] = inverse ? kernelL(1.0, z, lambda) : kernelK(1.0, z, lambda);
  }
  return trace;
}

KernelTables buildTables(const Grid& grid, const PlantParams& params, const SeriesTruncation& truncation) {
  truncation.validate();
  params.checkSeries(truncation.modeCount);

  KernelTables t;
  t.grid = grid;
  t.plantParams = params;
  t.truncation = truncation;

  std::size_t q = truncation.quadraturePoints;
  if (q % 2 == 0) ++q;
  t.sineCoeffsK = sineCoefficients(sampleBoundaryTrace(params.lambda, q, false), truncation.modeCount);
  t.sineCoeffsL = sineCoefficients(sampleBoundaryTrace(params.lambda, q, true), truncation.modeCount);
  t.forward = SineSeriesKernel(t.sineCoeffsK, params.lambda, params.delay);
  t.inverse = SineSeriesKernel(t.sineCoeffsL, 0.0, params.delay);

  const std::size_t n = grid.size();
  t.kGrid = DenseMatrix(n, n);
  t.lGrid = DenseMatrix(n, n);
  t.gammaGrid = DenseMatrix(n, n);
  t.deltaGrid = DenseMatrix(n, n);
  t.gGrid = DenseMatrix(n, n);
  t.pGrid = DenseMatrix(n, n);

  // The series kernels only depend on x - y along diagonals (g, p), so the
  // flux is tabulated once per offset.
  std::vector<double> gFlux(n), pFlux(n);
  for (std::size_t m = 0; m < n; ++m) {
    gFlux[m] = t.forward.flux(grid.node(m));
    pFlux[m] = t.inverse.flux(grid.node(m));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.node(i);
    for (std::size_t j = 0; j <= i; ++j) {
      const double y = grid.node(j);
      t.kGrid(i, j) = kernelK(x, y, params.lambda);
      t.lGrid(i, j) = kernelL(x, y, params.lambda);
      t.gGrid(i, j) = gFlux[i - j];
      t.pGrid(i, j) = pFlux[i - j];
    }
  }
  fillSeriesTable(t.forward, grid, t.gammaGrid);
  fillSeriesTable(t.inverse, grid, t.deltaGrid);
  // sin(n pi y) is not exactly zero at y = 1 in floating point; the series
  // vanishes there identically.
  for (std::size_t i = 0; i < n; ++i) {
    t.gammaGrid(i, 0) = t.gammaGrid(i, n - 1) = 0.0;
    t.deltaGrid(i, 0) = t.deltaGrid(i, n - 1) = 0.0;
  }
  const auto last = n - 1;
  t.gamma1.assign(t.gammaGrid.row(last).begin(), t.gammaGrid.row(last).end());
  t.g1.assign(t.gGrid.row(last).begin(), t.gGrid.row(last).end());
  return t;
}

}  // namespace rdpq
