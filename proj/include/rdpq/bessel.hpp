#pragma once

namespace rdpq {

/// Modified Bessel function I_1 by its power series, summed until the next
/// term drops below 1e-16 of the partial sum. Throws DomainError for z < 0.
double besselI1(double z);

/// Bessel function J_1 by the alternating power series, same stopping rule.
/// Accurate for the moderate arguments (z <= ~10) the kernels produce.
double besselJ1(double z);

}  // namespace rdpq
