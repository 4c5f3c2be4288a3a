#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rydberg {

struct NelderMeadOptions {
    double initial_step = 0.1;
    double collapse_tolerance = 1e-8;
};

struct NelderMeadResult {
    std::vector<double> best;
    double best_value = 0.0;
    std::size_t evaluations = 0;
    bool collapsed = false;
};

/// Downhill simplex minimisation starting at `start`, with the initial
/// simplex start + initial_step * e_k. Stops when `budget` evaluations are
/// used or the simplex extent (max coordinate distance to the best vertex)
/// drops below collapse_tolerance. The first evaluation is always `start`.
/// Dimension-adaptive coefficients are used for n >= 3.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> start, std::size_t budget,
                             const NelderMeadOptions& options = {});

}  // namespace rydberg
