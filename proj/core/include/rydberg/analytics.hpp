#pragma once

#include <span>
#include <vector>

#include "rydberg/dynamics.hpp"
#include "rydberg/ensemble.hpp"
#include "rydberg/model.hpp"
#include "rydberg/pulse.hpp"

namespace rydberg {

/// c = omega_gr / C6 (um^-6), cloud radius R (um), atom count N.
struct BlockadeErrorModel {
    double c = 0.0;
    double radius = 0.0;
    std::size_t atoms = 2;

    void validate() const;
};

/// Pair term summed over neighbours:
///   P_i = 1 / (N (N - 1)) sum_{j != i} 1 / (1 + c^2 d_ij^12).
std::vector<double> discrete_double_excitation(std::span<const Vec3> positions, double c);

enum class SphereMeasure {
    Standard,  // rho^2 sin(theta)
    Printed,   // rho^2 sin^2(theta), the form quoted alongside the continuum estimate
};

enum class ContinuumNormalization {
    PerAtom,  // 1 / (N V)
    Volume,   // 1 / V, i.e. density-scaled by the atom count
};

struct QuadratureOptions {
    double rel_tol = 1e-4;
    double abs_tol = 1e-10;  // floor for vanishing integrals (strong blockade)
    unsigned max_depth = 12;
    SphereMeasure measure = SphereMeasure::Standard;
    ContinuumNormalization normalization = ContinuumNormalization::PerAtom;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

/// Continuum version of the pair sum for an atom at radius r inside a
/// homogeneous sphere of radius R: the normalised integral over the sphere
/// of 1 / (1 + c^2 (r^2 + rho^2 - 2 r rho sin(theta) cos(phi))^6). Nested
/// adaptive Gauss-Kronrod; throws NumericalError (with the achieved
/// estimate in the message) when the error estimate misses both rel_tol
/// and abs_tol.
QuadratureResult continuum_p(double r, const BlockadeErrorModel& model,
                             const QuadratureOptions& options = {});

/// Same integral in closed form for c = 0.
double continuum_p_uncoupled(const BlockadeErrorModel& model, const QuadratureOptions& options = {});

struct AtomComparison {
    double radius = 0.0;                 // distance from the cloud centroid
    double simulated_single = 0.0;       // population of |r_i>, |e_i>
    double simulated_missing = 0.0;      // 1/N - simulated_single
    double simulated_multiple = 0.0;     // share of the >= 2 excitation sector
    double discrete_p = 0.0;             // pair sum at the actual positions
    double discrete_missing = 0.0;       // 1/N - discrete_p
    double continuum_p = 0.0;            // standard measure
    double continuum_missing = 0.0;      // 1/N - continuum_p
    double continuum_p_printed = 0.0;    // printed measure
};

struct ModelComparison {
    std::vector<AtomComparison> atoms;
    double coupling_c = 0.0;
    double cloud_radius = 0.0;
    double rms_deviation = 0.0;        // simulated_missing vs continuum_missing
    double correlation = 0.0;          // Pearson, same pair
    double population_multiple = 0.0;  // total >= 2 excitation population
};

struct ComparisonOptions {
    std::size_t n_steps = kDefaultTrotterSteps;
    QuadratureOptions quadrature;
    /// Rabi frequency entering c; <= 0 selects the per-atom pulse peak.
    double reference_omega = 0.0;
    /// Cloud radius R; <= 0 selects half the ensemble size.
    double cloud_radius = 0.0;
};

/// Runs the full dynamics for the ensemble and pairs every atom's missing
/// single-excitation population with the blockade estimates.
ModelComparison model_vs_simulation(const AtomEnsemble& ensemble, const PhysicalModel& model,
                                    const ControlPulse& pulse, const ComparisonOptions& options = {});

/// Pearson correlation of two equally long samples.
double pearson(std::span<const double> x, std::span<const double> y);

/// A pulse calibrated for N atoms applied to N' = N +- sqrt(N) atoms
/// rotates by pi sqrt(N'/N); the overlap with the intended state is the
/// cosine of the half-angle error.
struct PoissonSensitivity {
    double overlap_plus = 1.0;   // N' = N + sqrt(N)
    double overlap_minus = 1.0;  // N' = N - sqrt(N)
    double approximation = 1.0;  // 1 - pi^2 / (32 N)
};

PoissonSensitivity poisson_pulse_sensitivity(double atoms);

}  // namespace rydberg
