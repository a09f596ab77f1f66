#include "rdpq/bessel.hpp"

#include <cmath>
#include <string>

#include "rdpq/errors.hpp"

namespace rdpq {
namespace {

constexpr int kMaxTerms = 500;

// sum_m s^m (z/2)^{2m+1} / (m! (m+1)!) with s = +1 (I1) or -1 (J1)
double firstOrderSeries(double z, double sign, const char* name) {
  if (!(z >= 0.0)) throw DomainError(std::string(name) + ": argument must be nonnegative, got " + std::to_string(z));
  if (z == 0.0) return 0.0;
  const double half = 0.5 * z;
  const double q = sign * half * half;
  double term = half;
  double sum = term;
  for (int m = 1; m < kMaxTerms; ++m) {
    term *= q / (static_cast<double>(m) * static_cast<double>(m + 1));
    sum += term;
    if (std::fabs(term) < 1e-16 * std::fabs(sum) || term == 0.0) break;
  }
  return sum;
}

}  // namespace

double besselI1(double z) { return firstOrderSeries(z, 1.0, "besselI1"); }

double besselJ1(double z) { return firstOrderSeries(z, -1.0, "besselJ1"); }

}  // namespace rdpq
