#include "rydberg/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rydberg/control.hpp"

namespace rydberg {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;

double sphere_volume(double radius) { return 4.0 / 3.0 * kPi * radius * radius * radius; }

double normalization(const BlockadeErrorModel& model, const QuadratureOptions& options) {
    const double v = sphere_volume(model.radius);
    return options.normalization == ContinuumNormalization::PerAtom
               ? 1.0 / (static_cast<double>(model.atoms) * v)
               : 1.0 / v;
}

}  // namespace

void BlockadeErrorModel::validate() const {
    if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("blockade model: c must be >= 0");
    if (!(radius > 0.0)) throw DomainError("blockade model: radius must be positive");
    if (atoms < 2) throw DomainError("blockade model: need at least two atoms");
}

std::vector<double> discrete_double_excitation(std::span<const Vec3> positions, double c) {
    const std::size_t n = positions.size();
    if (n < 2) throw DomainError("discrete_double_excitation: need at least two atoms");
    const double norm = 1.0 / (static_cast<double>(n) * static_cast<double>(n - 1));
    const double c2 = c * c;
    std::vector<double> p(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d2 = (positions[i] - positions[j]).squaredNorm();
            if (!(d2 > 0.0)) throw DomainError("discrete_double_excitation: coincident atoms");
            const double d12 = std::pow(d2, 6);
            const double term = std::isinf(c2) ? 0.0 : 1.0 / (1.0 + c2 * d12);
            p[i] += term;
            p[j] += term;
        }
    }
    for (auto& v : p) v *= norm;
    return p;
}

QuadratureResult continuum_p(double r, const BlockadeErrorModel& model,
                             const QuadratureOptions& options) {
    model.validate();
    if (r < 0.0 || r > model.radius) throw DomainError("continuum_p: r must lie in [0, R]");
    const double c2 = model.c * model.c;
    const double inner_tol = 0.1 * options.rel_tol;
    const unsigned depth = options.max_depth;
    const bool printed = options.measure == SphereMeasure::Printed;
    double worst_inner = 0.0;

    // Symmetric in phi -> -phi and theta -> pi - theta: integrate a quarter.
    auto over_phi = [&](double rho, double sin_theta) {
        auto f = [&](double phi) {
            const double d2 = r * r + rho * rho - 2.0 * r * rho * sin_theta * std::cos(phi);
            return 1.0 / (1.0 + c2 * std::pow(std::max(d2, 0.0), 6));
        };
        double err = 0.0, l1 = 0.0;
        const double v = Kronrod::integrate(f, 0.0, kPi, depth, inner_tol, &err, &l1);
        if (l1 > 0.0) worst_inner = std::max(worst_inner, err / l1);
        return 2.0 * v;
    };
    auto over_theta = [&](double rho) {
        auto f = [&](double theta) {
            const double s = std::sin(theta);
            return (printed ? s * s : s) * over_phi(rho, s);
        };
        double err = 0.0, l1 = 0.0;
        const double v = Kronrod::integrate(f, 0.0, 0.5 * kPi, depth, inner_tol, &err, &l1);
        if (l1 > 0.0) worst_inner = std::max(worst_inner, err / l1);
        return 2.0 * v;
    };
    auto over_rho = [&](double rho) { return rho * rho * over_theta(rho); };

    double err = 0.0, l1 = 0.0;
    const double integral =
        Kronrod::integrate(over_rho, 0.0, model.radius, depth, inner_tol, &err, &l1);
    const double scale = normalization(model, options);
    QuadratureResult result{scale * integral, scale * (err + worst_inner * l1)};
    if (result.error > std::max(options.rel_tol * std::abs(result.value), options.abs_tol)) {
        std::ostringstream msg;
        msg << "continuum_p: quadrature did not converge (estimate " << result.value
            << ", error " << result.error << ")";
        throw NumericalError(msg.str());
    }
    return result;
}

double continuum_p_uncoupled(const BlockadeErrorModel& model, const QuadratureOptions& options) {
    model.validate();
    const double angular = options.measure == SphereMeasure::Standard ? 4.0 * kPi : kPi * kPi;
    const double r3 = model.radius * model.radius * model.radius;
    return normalization(model, options) * angular * r3 / 3.0;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("pearson: need two equal samples");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

ModelComparison model_vs_simulation(const AtomEnsemble& ensemble, const PhysicalModel& model,
                                    const ControlPulse& pulse, const ComparisonOptions& options) {
    const std::size_t n = ensemble.atoms();
    if (n < 2 || n > 12) throw DomainError("model_vs_simulation: needs 2..12 atoms");

    StatePreparationProblem problem{model, ensemble, Vec3::Zero(), options.n_steps, {}, 1.0};
    const auto state = prepare_full(problem, pulse);
    const auto single = single_excitation_shares(state);
    const auto multiple = multiple_excitation_shares(state);

    ModelComparison out;
    const double omega = options.reference_omega > 0.0 ? options.reference_omega : pulse.peak_gr();
    out.coupling_c = omega / model.c6;
    const Vec3 center = ensemble.centroid();
    double radius = options.cloud_radius > 0.0 ? options.cloud_radius : 0.5 * ensemble.size;
    if (!(radius > 0.0)) {
        for (const auto& p : ensemble.positions) radius = std::max(radius, (p - center).norm());
    }
    out.cloud_radius = radius;
    out.population_multiple = sector_populations(state).multiple;

    const auto discrete = discrete_double_excitation(ensemble.positions, out.coupling_c);
    const BlockadeErrorModel blockade{out.coupling_c, radius, n};
    auto printed_options = options.quadrature;
    printed_options.measure = SphereMeasure::Printed;
    auto standard_options = options.quadrature;
    standard_options.measure = SphereMeasure::Standard;
    const double share = 1.0 / static_cast<double>(n);

    std::vector<double> sim, theory;
    for (std::size_t i = 0; i < n; ++i) {
        AtomComparison a;
        a.radius = (ensemble.positions[i] - center).norm();
        const double r = std::min(a.radius, radius);
        a.simulated_single = single[i];
        a.simulated_missing = share - single[i];
        a.simulated_multiple = multiple[i];
        a.discrete_p = discrete[i];
        a.discrete_missing = share - discrete[i];
        a.continuum_p = continuum_p(r, blockade, standard_options).value;
        a.continuum_missing = share - a.continuum_p;
        a.continuum_p_printed = continuum_p(r, blockade, printed_options).value;
        sim.push_back(a.simulated_missing);
        theory.push_back(a.continuum_missing);
        out.atoms.push_back(a);
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) sq += std::pow(sim[i] - theory[i], 2);
    out.rms_deviation = std::sqrt(sq / static_cast<double>(n));
    out.correlation = pearson(sim, theory);
    return out;
}

PoissonSensitivity poisson_pulse_sensitivity(double atoms) {
    if (!(atoms >= 1.0)) throw DomainError("poisson_pulse_sensitivity: N must be >= 1");
    const double rel = 1.0 / std::sqrt(atoms);
    auto overlap = [](double ratio) { return std::cos(0.5 * kPi * (std::sqrt(ratio) - 1.0)); };
    return {overlap(1.0 + rel), overlap(1.0 - rel), 1.0 - kPi * kPi / (32.0 * atoms)};
}

}  // namespace rydberg
