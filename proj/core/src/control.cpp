#include "rydberg/control.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "rydberg/parallel.hpp"

namespace rydberg {

namespace {

double gaussian_mass(double a, double b, double center, double sigma) {
    const double s = sigma * std::sqrt(2.0);
    return 0.5 * sigma * std::sqrt(kTwoPi) * (std::erf((b - center) / s) - std::erf((a - center) / s));
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double finite_or_penalty(double v) { return std::isfinite(v) ? v : kFailedEvaluationPenalty; }

// Flat top of unit height on [start, start + width] with sin^2 edges.
double flat_top(double t, double start, double width, double ramp_fraction) {
    const double x = t - start;
    if (x < 0.0 || x > width) return 0.0;
    const double ramp = ramp_fraction * width;
    if (ramp > 0.0) {
        if (x < ramp) return std::pow(std::sin(0.5 * kPi * x / ramp), 2);
        if (x > width - ramp) return std::pow(std::sin(0.5 * kPi * (width - x) / ramp), 2);
    }
    return 1.0;
}

}  // namespace

ControlPulse gaussian_pi_guess(double duration, std::size_t atoms, std::size_t n_points,
                               const GuessShape& shape, double omega_max) {
    if (!(duration > 0.0)) throw DomainError("gaussian_pi_guess: duration must be positive");
    if (atoms == 0) throw DomainError("gaussian_pi_guess: need at least one atom");
    const double split = 0.5 * (shape.gr_center + shape.re_center) * duration;
    const double sigma = shape.width * duration;
    const double c_gr = shape.gr_center * duration;
    const double c_re = shape.re_center * duration;
    const double area_gr = kPi / std::sqrt(static_cast<double>(atoms));
    const double amp_gr = area_gr / gaussian_mass(0.0, split, c_gr, sigma);
    const double amp_re = kPi / gaussian_mass(split, duration, c_re, sigma);
    auto gauss = [sigma](double t, double c) { return std::exp(-0.5 * std::pow((t - c) / sigma, 2)); };
    return ControlPulse::sample(
        duration, n_points,
        [&](double t) -> std::pair<Complex, Complex> {
            if (t < split) return {amp_gr * gauss(t, c_gr), 0.0};
            return {0.0, amp_re * gauss(t, c_re)};
        },
        omega_max);
}

// ---------------------------------------------------------------------------
// CRAB

CrabParametrization::CrabParametrization(ControlPulse guess, std::size_t basis_size,
                                         std::vector<double> dithers_gr,
                                         std::vector<double> dithers_re, CrabForm form,
                                         bool phase_modulation)
    : guess_(std::move(guess)),
      basis_size_(basis_size),
      dithers_gr_(std::move(dithers_gr)),
      dithers_re_(std::move(dithers_re)),
      form_(form),
      phase_modulation_(phase_modulation),
      peak_gr_(guess_.peak_gr()),
      peak_re_(guess_.peak_re()) {
    if (basis_size_ == 0) throw DomainError("CRAB basis size must be >= 1");
    if (dithers_gr_.size() != basis_size_ || dithers_re_.size() != basis_size_)
        throw DomainError("CRAB: one dither per basis function required");
}

CrabParametrization CrabParametrization::random(ControlPulse guess, std::size_t basis_size,
                                                Rng& rng, CrabForm form, bool phase_modulation) {
    std::uniform_real_distribution<double> dither(-0.5, 0.5);
    std::vector<double> gr(basis_size), re(basis_size);
    for (auto& d : gr) d = dither(rng);
    for (auto& d : re) d = dither(rng);
    return CrabParametrization(std::move(guess), basis_size, std::move(gr), std::move(re), form,
                               phase_modulation);
}

double CrabParametrization::basis_function(int channel, std::size_t j, double t) const {
    const auto& dithers = channel == 0 ? dithers_gr_ : dithers_re_;
    const double omega =
        kTwoPi * static_cast<double>(j + 1) * (1.0 + dithers[j]) / guess_.duration();
    return j % 2 == 0 ? std::cos(omega * t) : std::sin(omega * t);
}

Complex CrabParametrization::channel_value(int channel, Complex guess,
                                           std::span<const double> coefficients, double t) const {
    const std::size_t n = basis_size_;
    const auto amp = coefficients.subspan(static_cast<std::size_t>(channel) * n, n);
    double correction = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        if (amp[j] != 0.0) correction += amp[j] * basis_function(channel, j, t);

    Complex value;
    if (form_ == CrabForm::Multiplicative) {
        value = guess * (1.0 + correction);
    } else {
        const double peak = channel == 0 ? peak_gr_ : peak_re_;
        value = guess + peak * std::sin(kPi * t / guess_.duration()) * correction;
    }
    if (phase_modulation_) {
        const auto ph = coefficients.subspan((2 + static_cast<std::size_t>(channel)) * n, n);
        double phase = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (ph[j] != 0.0) phase += ph[j] * basis_function(channel, j, t);
        value *= std::polar(1.0, phase);
    }
    return value;
}

std::pair<Complex, Complex> CrabParametrization::expand(std::span<const double> coefficients,
                                                        double t) const {
    if (coefficients.size() != parameter_count())
        throw DomainError("CRAB: coefficient count mismatch");
    const auto [g_gr, g_re] = guess_.at(t);
    return {channel_value(0, g_gr, coefficients, t), channel_value(1, g_re, coefficients, t)};
}

ControlPulse CrabParametrization::build(std::span<const double> coefficients,
                                        double omega_max) const {
    if (coefficients.size() != parameter_count())
        throw DomainError("CRAB: coefficient count mismatch");
    std::vector<Complex> gr(guess_.points()), re(guess_.points());
    for (std::size_t k = 0; k < guess_.points(); ++k) {
        const double t = guess_.time(k);
        gr[k] = channel_value(0, guess_.gr()[k], coefficients, t);
        re[k] = channel_value(1, guess_.re()[k], coefficients, t);
        if (std::abs(gr[k]) > omega_max) gr[k] *= omega_max / std::abs(gr[k]);
        if (std::abs(re[k]) > omega_max) re[k] *= omega_max / std::abs(re[k]);
    }
    return ControlPulse(guess_.duration(), std::move(gr), std::move(re));
}

OptimizationReport optimize(const PulseObjective& objective, const ControlPulse& guess,
                            const OptimizerOptions& options) {
    if (options.budget == 0) throw DomainError("optimize: budget must be >= 1");
    const auto start = std::chrono::steady_clock::now();
    OptimizationReport report;
    report.seed = options.seed;
    Rng rng = make_rng(options.seed);

    std::size_t remaining = options.budget;
    bool first = true;
    while (remaining > 0) {
        const auto crab = CrabParametrization::random(guess, options.basis_size, rng, options.form,
                                                      options.phase_modulation);
        auto cost = [&](std::span<const double> x) {
            const double v = finite_or_penalty(objective(crab.build(x, options.omega_max)));
            report.trace.push_back(v);
            return v;
        };
        const auto nm =
            nelder_mead(cost, std::vector<double>(crab.parameter_count(), 0.0), remaining,
                        {options.initial_step, options.collapse_tolerance});
        remaining -= std::min(remaining, nm.evaluations);
        if (first) report.guess_infidelity = report.trace.front();
        if (first || nm.best_value < report.best_infidelity) {
            report.best_infidelity = nm.best_value;
            report.best_coefficients = nm.best;
            report.best_dithers_gr = crab.dithers_gr();
            report.best_dithers_re = crab.dithers_re();
        }
        first = false;
        if (!nm.collapsed) break;
        if (remaining > 0) ++report.restarts;
    }
    report.evaluations = report.trace.size();
    report.wall_time_s = seconds_since(start);
    return report;
}

ControlPulse best_pulse(const OptimizationReport& report, const ControlPulse& guess,
                        const OptimizerOptions& options) {
    const CrabParametrization crab(guess, options.basis_size, report.best_dithers_gr,
                                   report.best_dithers_re, options.form, options.phase_modulation);
    return crab.build(report.best_coefficients, options.omega_max);
}

// ---------------------------------------------------------------------------
// Problems

WTarget StatePreparationProblem::target() const {
    if (k0.isZero(0.0)) return WTarget::symmetric(ensemble.atoms());
    return WTarget(ensemble.positions, k0);
}

FullState prepare_full(const StatePreparationProblem& problem, const ControlPulse& pulse) {
    auto state = FullState::ground(problem.ensemble.atoms());
    auto table = InteractionTable(problem.ensemble.positions, problem.model.c6);
    if (problem.interaction_scale != 1.0) table = table.scaled(problem.interaction_scale);
    std::vector<AtomDrive> drives;
    if (problem.drives.imprint_phases || problem.drives.doppler)
        drives = laser_drives(problem.model, problem.ensemble.positions,
                              problem.ensemble.velocities, problem.drives);
    evolve_full(state, problem.model, pulse, table, drives, problem.n_steps);
    return state;
}

double full_infidelity(const StatePreparationProblem& problem, const ControlPulse& pulse) {
    return infidelity(prepare_full(problem, pulse), problem.target());
}

// ---------------------------------------------------------------------------
// Reduced template

FlatKickTemplate FlatKickTemplate::pi_areas(double duration) {
    FlatKickTemplate t;
    t.width_gr = 0.72 * duration;
    t.width_re = 0.24 * duration;
    t.height_gr = kPi / ((1.0 - t.ramp_fraction) * t.width_gr);
    t.height_re = kPi / ((1.0 - t.ramp_fraction) * t.width_re);
    return t;
}

bool FlatKickTemplate::feasible(double duration) const {
    return height_gr > 0.0 && height_re > 0.0 && width_gr > 0.0 && width_re > 0.0 &&
           width_gr + width_re <= duration && ramp_fraction >= 0.0 && ramp_fraction <= 0.5;
}

ControlPulse flat_kick_pulse(const FlatKickTemplate& shape, double duration, double atom_number,
                             std::size_t n_points, double omega_max) {
    if (!shape.feasible(duration)) throw DomainError("flat_kick_pulse: infeasible template");
    if (!(atom_number > 0.0)) throw DomainError("flat_kick_pulse: atom number must be positive");
    const double gr = shape.height_gr / std::sqrt(atom_number);
    return ControlPulse::sample(
        duration, n_points,
        [&](double t) -> std::pair<Complex, Complex> {
            return {gr * flat_top(t, 0.0, shape.width_gr, shape.ramp_fraction),
                    shape.height_re * flat_top(t, shape.width_gr, shape.width_re, shape.ramp_fraction)};
        },
        omega_max);
}

double batch_mean(const std::vector<AtomEnsemble>& batch, const FlatKickTemplate& shape,
                  const EnsembleObjective& objective, const ReducedOptions& options) {
    if (batch.empty()) throw DomainError("reduced_optimize: empty batch");
    std::vector<double> costs(batch.size());
    parallel_for(batch.size(), options.workers, [&](std::size_t i) {
        const auto pulse = flat_kick_pulse(shape, options.duration,
                                           static_cast<double>(batch[i].atoms()), options.n_points,
                                           options.omega_max);
        costs[i] = finite_or_penalty(objective(pulse, batch[i]));
    });
    return std::accumulate(costs.begin(), costs.end(), 0.0) / static_cast<double>(costs.size());
}

ReducedReport reduced_optimize(const std::vector<AtomEnsemble>& batch,
                               const FlatKickTemplate& start, const EnsembleObjective& objective,
                               const ReducedOptions& options) {
    if (batch.empty()) throw DomainError("reduced_optimize: empty batch");
    if (options.budget == 0) throw DomainError("reduced_optimize: budget must be >= 1");
    const auto clock = std::chrono::steady_clock::now();
    ReducedReport report;

    auto decode = [&](std::span<const double> x) {
        FlatKickTemplate t = start;
        t.height_gr *= 1.0 + x[0];
        t.width_gr *= 1.0 + x[1];
        t.height_re *= 1.0 + x[2];
        t.width_re *= 1.0 + x[3];
        return t;
    };
    std::vector<AtomEnsemble> current;
    auto cost = [&](std::span<const double> x) {
        const auto t = decode(x);
        double v = kFailedEvaluationPenalty;
        if (t.feasible(options.duration)) {
            const auto& members =
                options.resample ? (current = options.resample(report.trace.size())) : batch;
            v = batch_mean(members, t, objective, options);
        }
        report.trace.push_back(v);
        return v;
    };
    const auto nm = nelder_mead(cost, std::vector<double>(4, 0.0), options.budget,
                                {options.initial_step, options.collapse_tolerance});
    report.best = decode(nm.best);
    report.best_mean_infidelity = nm.best_value;
    report.initial_mean_infidelity = report.trace.front();
    report.evaluations = report.trace.size();
    report.wall_time_s = seconds_since(clock);
    return report;
}

}  // namespace rydberg
