#pragma once

#include <span>
#include <vector>

#include "rdpq/grid.hpp"
#include "rdpq/kernels.hpp"

namespace rdpq {

enum class NormRole { L2, Sup };

/// Samples of a function on the uniform grid, tagged with the norm it is
/// measured in.
class Field {
 public:
  Field(Grid grid, std::vector<double> samples, NormRole role);
  static Field zeros(const Grid& grid, NormRole role);

  const Grid& grid() const { return grid_; }
  NormRole role() const { return role_; }
  std::span<const double> samples() const { return samples_; }
  std::span<double> samples() { return samples_; }
  double operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const { return samples_.size(); }

 private:
  Grid grid_;
  std::vector<double> samples_;
  NormRole role_;
};

/// (u, v) with u measured in L2 and v in sup. The target pair (w, z) uses the
/// same type.
struct CascadePair {
  Field u;
  Field v;

  CascadePair(Field u, Field v);
  static CascadePair zeros(const Grid& grid);
  static CascadePair fromSamples(const Grid& grid, std::vector<double> u, std::vector<double> v);
};

/// Composite-trapezoid L2 norm. Throws ConfigError if the role is not L2.
double l2Norm(const Field& f);
/// max |f_i|. Throws ConfigError if the role is not Sup.
double supNorm(const Field& f);
/// ||u||_2 + ||v||_inf
double jointNorm(const CascadePair& p);

// Span forms used inside the time-stepping loop, where building Fields would
// allocate every step.
double l2Norm(const Grid& grid, std::span<const double> f);
double supNorm(std::span<const double> f);

/// Dense operators realizing the direct and inverse transforms as mat-vecs.
/// k and l use trapezoid Volterra weights on the nodal tables. The series
/// kernels are integrated exactly against the piecewise-linear interpolant of
/// the field (product integration), which keeps the non-decaying boundary flux
/// terms of g and p accurate.
class TransformOperators {
 public:
  explicit TransformOperators(const KernelTables& tables);

  const Grid& grid() const { return grid_; }
  double delay() const { return delay_; }

  const DenseMatrix& volterraK() const { return kOp_; }
  const DenseMatrix& volterraL() const { return lOp_; }
  const DenseMatrix& gammaOp() const { return gammaOp_; }
  const DenseMatrix& deltaOp() const { return deltaOp_; }
  const DenseMatrix& gOp() const { return gOp_; }
  const DenseMatrix& pOp() const { return pOp_; }

  /// Weights a, b with U_nom = a.u + b.v, i.e. the x = 1 rows of gammaOp and D*gOp.
  std::span<const double> predictorStateWeights() const { return predU_; }
  std::span<const double> predictorActuatorWeights() const { return predV_; }

 private:
  Grid grid_;
  double delay_;
  DenseMatrix kOp_, lOp_, gammaOp_, deltaOp_, gOp_, pOp_;
  std::vector<double> predU_, predV_;
};

/// w = u - int_0^x k u,  z = v - D int_0^x g v - int_0^1 gamma u.
CascadePair directTransform(const CascadePair& pair, const TransformOperators& ops);
/// u = w + int_0^x l w,  v = z + int_0^1 delta w + D int_0^x p z.
CascadePair inverseTransform(const CascadePair& wz, const TransformOperators& ops);

CascadePair directTransform(const CascadePair& pair, const KernelTables& tables);
CascadePair inverseTransform(const CascadePair& wz, const KernelTables& tables);

/// int_0^1 sin(k y) phi_j(y) dy for the hat functions phi_j of the grid.
std::vector<double> sineHatIntegrals(const Grid& grid, double k);

/// Product-integration weights of a convolution kernel F(s) = sum_n a_n e^{r_n s}
/// on the grid: F(x_i - y) integrated against phi_j over [0, x_i] is
/// near[m] for j = i - m and far[m] for j = i - m - 1.
struct ConvolutionCellWeights {
  std::vector<double> near, far;
};
ConvolutionCellWeights convolutionCellWeights(const Grid& grid, std::span<const double> amplitudes,
                                              std::span<const double> rates);

}  // namespace rdpq
