#include "emission_kernels.hpp"

#include <algorithm>
#include <cmath>

namespace rydberg::detail {

double field_intensity(const double* x, const double* y, const double* z, const double* cre,
                       const double* cim, std::size_t n, double qx, double qy, double qz,
                       double* scratch) {
    double* phase = scratch;
    double* cs = scratch + n;
    double* sn = scratch + 2 * n;
    for (std::size_t i = 0; i < n; ++i) phase[i] = qx * x[i] + qy * y[i] + qz * z[i];
    // Separate loops keep each one a plain vector-math call.
    for (std::size_t i = 0; i < n; ++i) cs[i] = std::cos(phase[i]);
    for (std::size_t i = 0; i < n; ++i) sn[i] = std::sin(phase[i]);
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += cre[i] * cs[i] - cim[i] * sn[i];
        im += cre[i] * sn[i] + cim[i] * cs[i];
    }
    return re * re + im * im;
}

double pair_sinc_sum(const double* x, const double* y, const double* z, const double* cre,
                     const double* cim, std::size_t n, double k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j], dy = y[i] - y[j], dz = z[i] - z[j];
            const double kd = std::max(k * std::sqrt(dx * dx + dy * dy + dz * dz), 1e-150);
            row += (cre[i] * cre[j] + cim[i] * cim[j]) * (std::sin(kd) / kd);
        }
        total += row;
    }
    return total;
}

}  // namespace rydberg::detail
