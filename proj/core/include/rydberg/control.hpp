#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "rydberg/dynamics.hpp"
#include "rydberg/ensemble.hpp"
#include "rydberg/model.hpp"
#include "rydberg/nelder_mead.hpp"
#include "rydberg/pulse.hpp"
#include "rydberg/random.hpp"

namespace rydberg {

inline constexpr double kDefaultOmegaMax = kTwoPi * 2.0;  // rad/ns
inline constexpr double kFailedEvaluationPenalty = 2.0;

/// Shape of the sequential Gaussian pulse pair, in fractions of T.
struct GuessShape {
    double gr_center = 0.25;
    double re_center = 0.75;
    double width = 1.0 / 12.0;
};

/// Gaussian pi-pulse pair: omega_gr with area pi / sqrt(N) (collective pi
/// rotation under blockade) followed by omega_re with area pi. Each
/// Gaussian is truncated to its half of the window and normalised so the
/// truncated area is exact.
ControlPulse gaussian_pi_guess(double duration, std::size_t atoms, std::size_t n_points,
                               const GuessShape& shape = {},
                               double omega_max = std::numeric_limits<double>::infinity());

enum class CrabForm { Multiplicative, Additive };

/// Chopped random basis on top of a guess pulse. Per channel, basis
/// function j (0-based) oscillates at 2 pi (j + 1)(1 + dither_j) / T and is a
/// cosine for even j, a sine for odd j.
///   Multiplicative: g(t) (1 + sum_j c_j f_j(t))
///   Additive:       g(t) + max|g| sin(pi t / T) sum_j c_j f_j(t)
/// With phase modulation each channel is further multiplied by
/// exp(i sum_j c'_j f_j(t)). Coefficient layout:
///   [gr amplitude | re amplitude | gr phase | re phase], N_i entries each.
class CrabParametrization {
public:
    CrabParametrization(ControlPulse guess, std::size_t basis_size, std::vector<double> dithers_gr,
                        std::vector<double> dithers_re, CrabForm form = CrabForm::Multiplicative,
                        bool phase_modulation = false);

    /// Dithers drawn uniformly from [-0.5, 0.5].
    static CrabParametrization random(ControlPulse guess, std::size_t basis_size, Rng& rng,
                                      CrabForm form = CrabForm::Multiplicative,
                                      bool phase_modulation = false);

    std::size_t basis_size() const { return basis_size_; }
    std::size_t parameter_count() const { return (phase_modulation_ ? 4 : 2) * basis_size_; }
    const ControlPulse& guess() const { return guess_; }
    const std::vector<double>& dithers_gr() const { return dithers_gr_; }
    const std::vector<double>& dithers_re() const { return dithers_re_; }
    CrabForm form() const { return form_; }
    bool phase_modulation() const { return phase_modulation_; }

    double basis_function(int channel, std::size_t j, double t) const;
    std::pair<Complex, Complex> expand(std::span<const double> coefficients, double t) const;
    /// Reconstructs the pulse on the guess grid.
    ControlPulse build(std::span<const double> coefficients,
                       double omega_max = std::numeric_limits<double>::infinity()) const;

private:
    Complex channel_value(int channel, Complex guess, std::span<const double> coefficients,
                          double t) const;

    ControlPulse guess_;
    std::size_t basis_size_;
    std::vector<double> dithers_gr_;
    std::vector<double> dithers_re_;
    CrabForm form_;
    bool phase_modulation_;
    double peak_gr_;
    double peak_re_;
};

/// Infidelity (or any cost in [0, 1]) of a candidate pulse.
using PulseObjective = std::function<double(const ControlPulse&)>;

struct OptimizerOptions {
    std::size_t basis_size = 14;
    std::size_t budget = 10'000;  // function evaluations
    double initial_step = 0.1;
    double collapse_tolerance = 1e-8;
    CrabForm form = CrabForm::Multiplicative;
    bool phase_modulation = false;
    double omega_max = kDefaultOmegaMax;
    std::uint64_t seed = 0;
};

struct OptimizationReport {
    std::vector<double> best_coefficients;
    std::vector<double> best_dithers_gr;
    std::vector<double> best_dithers_re;
    double best_infidelity = 1.0;
    double guess_infidelity = 1.0;
    std::size_t evaluations = 0;
    std::size_t restarts = 0;
    std::vector<double> trace;  // cost of every evaluation, in order
    std::uint64_t seed = 0;
    double wall_time_s = 0.0;
};

/// CRAB: Nelder-Mead over the basis coefficients starting from zero (the
/// guess), restarting with fresh dithers whenever the simplex collapses,
/// until the budget is spent. Non-finite costs are replaced by the penalty.
OptimizationReport optimize(const PulseObjective& objective, const ControlPulse& guess,
                            const OptimizerOptions& options);

/// Rebuilds the best pulse of a report.
ControlPulse best_pulse(const OptimizationReport& report, const ControlPulse& guess,
                        const OptimizerOptions& options);

/// Full state-vector problem: evolve |g..g> and compare with the W target.
struct StatePreparationProblem {
    PhysicalModel model;
    AtomEnsemble ensemble;
    Vec3 k0 = Vec3::Zero();
    std::size_t n_steps = kDefaultTrotterSteps;
    DriveOptions drives;
    double interaction_scale = 1.0;

    WTarget target() const;
};

FullState prepare_full(const StatePreparationProblem& problem, const ControlPulse& pulse);
double full_infidelity(const StatePreparationProblem& problem, const ControlPulse& pulse);

/// Flat omega_gr pulse followed immediately by an omega_re kick. The gr
/// height is collective: the per-atom amplitude is height_gr / sqrt(N).
/// Edges are sin^2 ramps lasting ramp_fraction of each width.
struct FlatKickTemplate {
    double height_gr = 0.0;  // rad/ns
    double width_gr = 0.0;   // ns
    double height_re = 0.0;  // rad/ns
    double width_re = 0.0;   // ns
    double ramp_fraction = 0.2;

    /// pi-area pulses with widths 0.72 T and 0.24 T.
    static FlatKickTemplate pi_areas(double duration);
    bool feasible(double duration) const;
};

ControlPulse flat_kick_pulse(const FlatKickTemplate& shape, double duration, double atom_number,
                             std::size_t n_points,
                             double omega_max = std::numeric_limits<double>::infinity());

/// Cost of a pulse on one ensemble.
using EnsembleObjective = std::function<double(const ControlPulse&, const AtomEnsemble&)>;

struct ReducedOptions {
    std::size_t budget = 200;
    double initial_step = 0.1;  // relative change of each template parameter
    double collapse_tolerance = 1e-8;
    double duration = 2.5;
    std::size_t n_points = kDefaultTrotterSteps + 1;
    double omega_max = kDefaultOmegaMax;
    std::size_t workers = 1;  // parallel evaluation of the batch members
    /// Draw a fresh batch for each evaluation instead of the fixed one.
    std::function<std::vector<AtomEnsemble>(std::size_t evaluation)> resample;
};

struct ReducedReport {
    FlatKickTemplate best;
    double best_mean_infidelity = 1.0;
    double initial_mean_infidelity = 1.0;
    std::size_t evaluations = 0;
    std::vector<double> trace;
    double wall_time_s = 0.0;
};

/// Minimises the batch mean of `objective` over the four template
/// parameters (heights and widths), each parametrised relative to `start`.
ReducedReport reduced_optimize(const std::vector<AtomEnsemble>& batch,
                               const FlatKickTemplate& start, const EnsembleObjective& objective,
                               const ReducedOptions& options);

double batch_mean(const std::vector<AtomEnsemble>& batch, const FlatKickTemplate& shape,
                  const EnsembleObjective& objective, const ReducedOptions& options);

}  // namespace rydberg
