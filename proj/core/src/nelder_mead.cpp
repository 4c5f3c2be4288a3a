#include "rydberg/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rydberg/units.hpp"

namespace rydberg {

namespace {

struct Vertex {
    std::vector<double> x;
    double value;
};

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> start, std::size_t budget,
                             const NelderMeadOptions& options) {
    if (budget == 0) throw DomainError("nelder_mead: budget must be >= 1");
    const std::size_t n = start.size();
    NelderMeadResult result;

    auto eval = [&](const std::vector<double>& x) {
        ++result.evaluations;
        const double v = f(x);
        if (result.evaluations == 1 || v < result.best_value) {
            result.best_value = v;
            result.best = x;
        }
        return v;
    };
    auto exhausted = [&] { return result.evaluations >= budget; };

    std::vector<Vertex> simplex;
    simplex.reserve(n + 1);
    simplex.push_back({start, eval(start)});
    for (std::size_t k = 0; k < n && !exhausted(); ++k) {
        auto x = start;
        x[k] += options.initial_step;
        simplex.push_back({x, eval(x)});
    }
    if (n == 0 || simplex.size() < n + 1) return result;

    const double dn = static_cast<double>(n);
    const bool adaptive = n >= 3;
    const double alpha = 1.0;
    const double beta = adaptive ? 1.0 + 2.0 / dn : 2.0;
    const double gamma = adaptive ? 0.75 - 0.5 / dn : 0.5;
    const double delta = adaptive ? 1.0 - 1.0 / dn : 0.5;

    auto by_value = [](const Vertex& a, const Vertex& b) { return a.value < b.value; };
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    while (!exhausted()) {
        std::stable_sort(simplex.begin(), simplex.end(), by_value);

        double extent = 0.0;
        for (std::size_t k = 1; k <= n; ++k)
            for (std::size_t j = 0; j < n; ++j)
                extent = std::max(extent, std::abs(simplex[k].x[j] - simplex[0].x[j]));
        if (extent < options.collapse_tolerance) {
            result.collapsed = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[k].x[j] / dn;

        Vertex& worst = simplex[n];
        for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + alpha * (centroid[j] - worst.x[j]);
        const double fr = eval(xr);

        if (fr < simplex[0].value) {
            if (exhausted()) break;
            for (std::size_t j = 0; j < n; ++j) xe[j] = centroid[j] + beta * (xr[j] - centroid[j]);
            const double fe = eval(xe);
            worst = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
            continue;
        }
        if (fr < simplex[n - 1].value) {
            worst = {xr, fr};
            continue;
        }
        if (exhausted()) break;

        const bool outside = fr < worst.value;
        for (std::size_t j = 0; j < n; ++j) {
            xc[j] = outside ? centroid[j] + gamma * (xr[j] - centroid[j])
                            : centroid[j] - gamma * (centroid[j] - worst.x[j]);
        }
        const double fc = eval(xc);
        if (fc < (outside ? fr : worst.value)) {
            worst = {xc, fc};
            continue;
        }

        for (std::size_t k = 1; k <= n && !exhausted(); ++k) {
            for (std::size_t j = 0; j < n; ++j)
                simplex[k].x[j] = simplex[0].x[j] + delta * (simplex[k].x[j] - simplex[0].x[j]);
            simplex[k].value = eval(simplex[k].x);
        }
    }
    return result;
}

}  // namespace rydberg
