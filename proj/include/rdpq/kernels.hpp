#pragma once

// Backstepping kernels. k and l are closed-form Bessel kernels on the
// triangle 0 <= y <= x <= 1; gamma, g (forward) and delta, p (inverse) are
// truncated sine/exponential series built from the sine coefficients of
// k(1,.) and l(1,.).

#include <cstddef>
#include <span>
#include <vector>

#include "rdpq/grid.hpp"
#include "rdpq/params.hpp"

namespace rdpq {

struct SeriesTruncation {
  std::size_t modeCount = 60;
  std::size_t quadraturePoints = 2001;
  double tailTolerance = 1e-2;

  /// modeCount >= 1 and quadraturePoints >= 20 * modeCount.
  void validate() const;

  friend bool operator==(const SeriesTruncation&, const SeriesTruncation&) = default;
};

double kernelK(double x, double y, double lambda);
double kernelL(double x, double y, double lambda);

/// c_n = int_0^1 sin(n pi z) f(z) dz, n = 1..modes, by composite Simpson on a
/// uniform sampling of [0,1] (odd sample count). Throws ConfigError when the
/// sampling cannot resolve the requested modes (fewer than 20 samples per mode).
std::vector<double> sineCoefficients(std::span<const double> trace, std::size_t modes);

/// One truncated series  S(x,y) = 2 sum_n c_n e^{r_n x} sin(n pi y)  with
/// r_n = D (reaction - n^2 pi^2), together with its boundary flux
/// F(s) = -S_y(s,1) = -2 sum_n n pi (-1)^n c_n e^{r_n s}.
/// reaction = lambda gives gamma/g, reaction = 0 gives delta/p.
class SineSeriesKernel {
 public:
  SineSeriesKernel() = default;
  SineSeriesKernel(std::vector<double> coeffs, double reaction, double delay);

  std::size_t modes() const { return coeffs_.size(); }
  std::span<const double> coefficients() const { return coeffs_; }
  /// r_n for n = 1..modes (index n-1).
  std::span<const double> rates() const { return rates_; }
  /// a_n = -2 n pi (-1)^n c_n, so that F(s) = sum a_n e^{r_n s}.
  std::span<const double> fluxAmplitudes() const { return flux_; }

  double value(double x, double y) const;
  double flux(double s) const;

 private:
  std::vector<double> coeffs_;
  std::vector<double> rates_;
  std::vector<double> flux_;
};

/// Point evaluations of the four series kernels, with the truncation and
/// resonance checks. coeffs are the sine coefficients of k(1,.) (gamma, g) or
/// l(1,.) (delta, p); only the first truncation.modeCount are used.
double kernelGamma(double x, double y, const PlantParams& params, std::span<const double> coeffs,
                   const SeriesTruncation& truncation);
double kernelG(double x, double y, const PlantParams& params, std::span<const double> coeffs,
               const SeriesTruncation& truncation);
double kernelDelta(double x, double y, const PlantParams& params, std::span<const double> coeffs,
                   const SeriesTruncation& truncation);
double kernelP(double x, double y, const PlantParams& params, std::span<const double> coeffs,
               const SeriesTruncation& truncation);

/// Grid discretization of every kernel. Triangular tables are stored as full
/// row-major (x, y) matrices with zeros above the diagonal.
struct KernelTables {
  Grid grid{1};
  PlantParams plantParams;
  SeriesTruncation truncation;

  DenseMatrix kGrid, lGrid;
  DenseMatrix gammaGrid, deltaGrid;
  DenseMatrix gGrid, pGrid;
  std::vector<double> gamma1, g1;
  std::vector<double> sineCoeffsK, sineCoeffsL;

  SineSeriesKernel forward;  // gamma, g
  SineSeriesKernel inverse;  // delta, p
};

KernelTables buildTables(const Grid& grid, const PlantParams& params, const SeriesTruncation& truncation);

/// Samples f(1, z) of kernelK or kernelL on `count` uniform nodes of [0,1].
std::vector<double> sampleBoundaryTrace(double lambda, std::size_t count, bool inverse);

}  // namespace rdpq
