#pragma once

#include <cstddef>

// Hot loops of the emission kernel, compiled in their own translation unit
// with relaxed floating-point semantics so that sin/cos vectorise.
namespace rydberg::detail {

/// |sum_i c_i exp(i (qx x_i + qy y_i + qz z_i))|^2; `scratch` holds 3 n doubles.
double field_intensity(const double* x, const double* y, const double* z, const double* cre,
                       const double* cim, std::size_t n, double qx, double qy, double qz,
                       double* scratch);

/// sum_{i<j} Re(c_i c_j*) sinc(k |r_i - r_j|).
double pair_sinc_sum(const double* x, const double* y, const double* z, const double* cre,
                     const double* cim, std::size_t n, double k);

}  // namespace rydberg::detail
