#include "rydberg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace rydberg {

namespace {

// Steps through all basis indices keeping the base-3 digits in sync.
class DigitCounter {
public:
    explicit DigitCounter(std::size_t atoms) : digits_(atoms, 0) {}
    const std::vector<int>& digits() const { return digits_; }
    void next() {
        for (auto& d : digits_) {
            if (++d < 3) return;
            d = 0;
        }
    }

private:
    std::vector<int> digits_;
};

std::vector<double> interaction_energies(std::size_t atoms, std::size_t dim,
                                         const InteractionTable& table) {
    std::vector<double> energy(dim, 0.0);
    if (atoms < 2) return energy;
    DigitCounter counter(atoms);
    std::vector<std::size_t> rydberg;
    rydberg.reserve(atoms);
    for (std::size_t idx = 0; idx < dim; ++idx, counter.next()) {
        rydberg.clear();
        const auto& d = counter.digits();
        for (std::size_t a = 0; a < atoms; ++a)
            if (d[a] == 1) rydberg.push_back(a);
        double e = 0.0;
        for (std::size_t p = 0; p < rydberg.size(); ++p)
            for (std::size_t q = p + 1; q < rydberg.size(); ++q)
                e += table.shift(rydberg[p], rydberg[q]);
        energy[idx] = e;
    }
    return energy;
}

void apply_local(Complex* psi, std::size_t dim, std::size_t stride, const Matrix3c& u) {
    const Complex u00 = u(0, 0), u01 = u(0, 1), u02 = u(0, 2);
    const Complex u10 = u(1, 0), u11 = u(1, 1), u12 = u(1, 2);
    const Complex u20 = u(2, 0), u21 = u(2, 1), u22 = u(2, 2);
    const std::size_t block = 3 * stride;
    for (std::size_t base = 0; base < dim; base += block) {
        Complex* p0 = psi + base;
        Complex* p1 = p0 + stride;
        Complex* p2 = p1 + stride;
        for (std::size_t k = 0; k < stride; ++k) {
            const Complex a = p0[k], b = p1[k], c = p2[k];
            p0[k] = u00 * a + u01 * b + u02 * c;
            p1[k] = u10 * a + u11 * b + u12 * c;
            p2[k] = u20 * a + u21 * b + u22 * c;
        }
    }
}

void apply_phases(std::span<Complex> psi, const std::vector<Complex>& phases) {
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= phases[i];
}

double squared_norm(std::span<const Complex> v) {
    double s = 0.0;
    for (const auto& a : v) s += std::norm(a);
    return s;
}

}  // namespace

std::size_t pow3(std::size_t n) {
    std::size_t p = 1;
    for (std::size_t i = 0; i < n; ++i) p *= 3;
    return p;
}

std::vector<AtomDrive> laser_drives(const PhysicalModel& model, std::span<const Vec3> positions,
                                    std::span<const Vec3> velocities,
                                    const DriveOptions& options) {
    if (options.doppler && velocities.size() != positions.size())
        throw DomainError("laser_drives: velocities required for Doppler shifts");
    std::vector<AtomDrive> drives(positions.size());
    const Vec3 kgr = model.two_photon_wavevector();
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (options.imprint_phases) {
            drives[i].phase_gr = kgr.dot(positions[i]);
            drives[i].phase_re = -model.k3.dot(positions[i]);
        }
        if (options.doppler) drives[i].detuning = doppler_shift(model, velocities[i]);
    }
    return drives;
}

// ---------------------------------------------------------------------------
// FullState

FullState::FullState(std::size_t atoms, std::vector<Complex> amplitudes)
    : atoms_(atoms), amps_(std::move(amplitudes)) {
    if (atoms_ == 0 || atoms_ > kMaxFullAtoms)
        throw DomainError("FullState supports 1.." + std::to_string(kMaxFullAtoms) + " atoms");
    if (amps_.size() != pow3(atoms_)) throw DomainError("FullState: amplitude count != 3^N");
}

FullState FullState::ground(std::size_t atoms) {
    if (atoms == 0 || atoms > kMaxFullAtoms)
        throw DomainError("FullState supports 1.." + std::to_string(kMaxFullAtoms) + " atoms");
    std::vector<Complex> amps(pow3(atoms));
    amps[0] = 1.0;
    return FullState(atoms, std::move(amps));
}

double FullState::norm() const { return std::sqrt(squared_norm(amps_)); }

std::size_t FullState::single_index(std::size_t i, int level) const {
    return static_cast<std::size_t>(level) * pow3(i);
}

int FullState::digit(std::size_t index, std::size_t atom) {
    return static_cast<int>((index / pow3(atom)) % 3);
}

std::vector<Complex> FullState::single_excitation_amplitudes() const {
    std::vector<Complex> out(2 * atoms_);
    for (std::size_t i = 0; i < atoms_; ++i) {
        out[i] = amps_[single_index(i, 1)];
        out[atoms_ + i] = amps_[single_index(i, 2)];
    }
    return out;
}

Matrix3c local_propagator(const Matrix3c& hamiltonian, double dt) {
    Eigen::SelfAdjointEigenSolver<Matrix3c> solver(hamiltonian);
    const auto& values = solver.eigenvalues();
    const auto& vectors = solver.eigenvectors();
    Eigen::Vector3cd phases;
    for (int k = 0; k < 3; ++k) phases[k] = std::polar(1.0, -values[k] * dt);
    return vectors * phases.asDiagonal() * vectors.adjoint();
}

void evolve_full(FullState& state, const PhysicalModel& model, const ControlPulse& pulse,
                 const InteractionTable& interactions, std::span<const AtomDrive> drives,
                 std::size_t n_steps) {
    const std::size_t atoms = state.atoms();
    if (interactions.size() != atoms)
        throw DomainError("evolve_full: interaction table size does not match the state");
    if (!drives.empty() && drives.size() != atoms)
        throw DomainError("evolve_full: one drive entry per atom required");
    if (n_steps == 0) throw DomainError("evolve_full: n_steps must be positive");

    const std::size_t dim = state.dimension();
    const double dt = pulse.duration() / static_cast<double>(n_steps);

    const auto energy = interaction_energies(atoms, dim, interactions);
    const bool interacting = std::any_of(energy.begin(), energy.end(), [](double e) { return e != 0.0; });
    std::vector<Complex> half, full;
    if (interacting) {
        half.resize(dim);
        full.resize(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            half[i] = std::polar(1.0, -0.5 * energy[i] * dt);
            full[i] = std::polar(1.0, -energy[i] * dt);
        }
    }

    // Atoms sharing a drive share the propagator of each step.
    std::vector<AtomDrive> classes;
    std::vector<std::size_t> class_of(atoms, 0);
    if (drives.empty()) {
        classes.push_back({});
    } else {
        for (std::size_t a = 0; a < atoms; ++a) {
            auto it = std::find(classes.begin(), classes.end(), drives[a]);
            class_of[a] = static_cast<std::size_t>(it - classes.begin());
            if (it == classes.end()) classes.push_back(drives[a]);
        }
    }
    std::vector<Matrix3c> propagators(classes.size());
    std::vector<bool> identity(classes.size());

    auto psi = state.amplitudes();
    if (interacting) apply_phases(psi, half);
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double t = (static_cast<double>(k) + 0.5) * dt;
        const auto [gr, re] = pulse.at(t);
        for (std::size_t c = 0; c < classes.size(); ++c) {
            const auto& d = classes[c];
            const Matrix3c h = build_local(model, gr * std::polar(1.0, d.phase_gr),
                                           re * std::polar(1.0, d.phase_re), d.detuning)
                                   .matrix;
            identity[c] = h.isZero(0.0);
            if (!identity[c]) propagators[c] = local_propagator(h, dt);
        }
        std::size_t stride = 1;
        for (std::size_t a = 0; a < atoms; ++a, stride *= 3) {
            if (!identity[class_of[a]]) apply_local(psi.data(), dim, stride, propagators[class_of[a]]);
        }
        if (interacting) apply_phases(psi, k + 1 == n_steps ? half : full);
    }
}

FullState evolve_full(const FullState& state, const PhysicalModel& model,
                      const ControlPulse& pulse, std::span<const Vec3> positions,
                      std::size_t n_steps) {
    if (positions.size() != state.atoms())
        throw DomainError("evolve_full: state has " + std::to_string(state.atoms()) +
                          " atoms but " + std::to_string(positions.size()) + " positions given");
    FullState out = state;
    const InteractionTable table(positions, model.c6);
    evolve_full(out, model, pulse, table, {}, n_steps);
    return out;
}

// ---------------------------------------------------------------------------
// Restricted sector

RestrictedState::RestrictedState(std::size_t atoms) : atoms_(atoms), amps_(1 + 2 * atoms) {
    amps_[0] = 1.0;
}

double RestrictedState::norm() const { return std::sqrt(squared_norm(amps_)); }

std::vector<Complex> RestrictedState::single_excitation_amplitudes() const {
    return {amps_.begin() + 1, amps_.end()};
}

namespace {

// Structured Hamiltonian of the {G, r_i, e_i} sector at one instant.
struct SectorHamiltonian {
    std::size_t atoms = 0;
    Complex half_gr;   // omega_gr / 2
    Complex half_re;   // omega_re / 2
    double delta_re = 0.0;
    const std::vector<Complex>* phase_gr = nullptr;
    const std::vector<Complex>* phase_re = nullptr;
    const std::vector<double>* detuning = nullptr;

    void apply(const std::vector<Complex>& x, std::vector<Complex>& out) const {
        const std::size_t n = atoms;
        const auto& pg = *phase_gr;
        const auto& pe = *phase_re;
        const auto& det = *detuning;
        const Complex g = x[0];
        Complex acc{};
        for (std::size_t i = 0; i < n; ++i) {
            const Complex r = x[1 + i];
            const Complex e = x[1 + n + i];
            const Complex ug = half_gr * pg[i];
            const Complex we = half_re * pe[i];
            acc += std::conj(ug) * r;
            out[1 + i] = ug * g + det[i] * r + std::conj(we) * e;
            out[1 + n + i] = we * r + delta_re * e;
        }
        out[0] = acc;
    }
};

}  // namespace

RestrictedState evolve_restricted(RestrictedState state, const PhysicalModel& model,
                                  const ControlPulse& pulse, std::span<const AtomDrive> drives,
                                  std::size_t n_steps) {
    const std::size_t n = state.atoms();
    if (!drives.empty() && drives.size() != n)
        throw DomainError("evolve_restricted: one drive entry per atom required");
    if (n_steps == 0) throw DomainError("evolve_restricted: n_steps must be positive");
    if (n == 0) return state;

    std::vector<Complex> pg(n, 1.0), pe(n, 1.0);
    std::vector<double> det(n, model.delta_ir);
    double max_det = std::abs(model.delta_re);
    for (std::size_t i = 0; i < n; ++i) {
        if (!drives.empty()) {
            pg[i] = std::polar(1.0, drives[i].phase_gr);
            pe[i] = std::polar(1.0, drives[i].phase_re);
            det[i] += drives[i].detuning;
        }
        max_det = std::max(max_det, std::abs(det[i]));
    }

    SectorHamiltonian h{n, {}, {}, model.delta_re, &pg, &pe, &det};
    const double dt = pulse.duration() / static_cast<double>(n_steps);
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    std::vector<Complex> psi(state.amplitudes().begin(), state.amplitudes().end());
    std::vector<Complex> term(psi.size()), next(psi.size());

    for (std::size_t k = 0; k < n_steps; ++k) {
        const auto [gr, re] = pulse.at((static_cast<double>(k) + 0.5) * dt);
        h.half_gr = 0.5 * gr;
        h.half_re = 0.5 * re;
        const double bound = std::abs(h.half_gr) * sqrt_n + max_det + std::abs(h.half_re);
        if (bound == 0.0) continue;
        const auto substeps = static_cast<std::size_t>(std::ceil(bound * dt / 0.25));
        const double tau = dt / static_cast<double>(substeps);
        for (std::size_t s = 0; s < substeps; ++s) {
            // psi <- sum_m (-i tau H)^m psi / m!
            term = psi;
            const double scale = std::sqrt(squared_norm(psi));
            for (int m = 1; m <= 40; ++m) {
                h.apply(term, next);
                const Complex factor(0.0, -tau / m);
                double tn = 0.0;
                for (std::size_t i = 0; i < psi.size(); ++i) {
                    term[i] = factor * next[i];
                    psi[i] += term[i];
                    tn += std::norm(term[i]);
                }
                if (std::sqrt(tn) <= 1e-17 * scale) break;
            }
        }
    }
    std::copy(psi.begin(), psi.end(), state.amplitudes().begin());
    return state;
}

RestrictedState evolve_restricted(const AtomEnsemble& ensemble, const PhysicalModel& model,
                                  const ControlPulse& pulse, const RestrictedOptions& options) {
    const auto drives = laser_drives(model, ensemble.positions, ensemble.velocities,
                                     {options.imprint_phases, options.doppler});
    return evolve_restricted(RestrictedState(ensemble.atoms()), model, pulse, drives,
                             options.n_steps);
}

// ---------------------------------------------------------------------------
// Target and observables

WTarget::WTarget(std::span<const Vec3> positions, const Vec3& k0) {
    if (positions.empty()) throw DomainError("WTarget needs at least one atom");
    const double amp = 1.0 / std::sqrt(static_cast<double>(positions.size()));
    coeffs_.reserve(positions.size());
    for (const auto& r : positions) coeffs_.push_back(std::polar(amp, k0.dot(r)));
}

WTarget WTarget::symmetric(std::size_t atoms) {
    if (atoms == 0) throw DomainError("WTarget needs at least one atom");
    return WTarget(std::vector<Complex>(atoms, 1.0 / std::sqrt(static_cast<double>(atoms))));
}

Complex WTarget::overlap(const FullState& state) const {
    if (state.atoms() != atoms()) throw DomainError("WTarget: atom count mismatch");
    Complex s{};
    for (std::size_t i = 0; i < atoms(); ++i)
        s += std::conj(coeffs_[i]) * state[state.single_index(i, 2)];
    return s;
}

Complex WTarget::overlap(const RestrictedState& state) const {
    if (state.atoms() != atoms()) throw DomainError("WTarget: atom count mismatch");
    Complex s{};
    for (std::size_t i = 0; i < atoms(); ++i) s += std::conj(coeffs_[i]) * state.excited(i);
    return s;
}

FullState WTarget::as_full_state() const {
    auto state = FullState::ground(atoms());
    state[0] = 0.0;
    for (std::size_t i = 0; i < atoms(); ++i) state[state.single_index(i, 2)] = coeffs_[i];
    return state;
}

double infidelity(const FullState& state, const WTarget& target) {
    return std::clamp(1.0 - std::norm(target.overlap(state)), 0.0, 1.0);
}

double infidelity(const RestrictedState& state, const WTarget& target) {
    return std::clamp(1.0 - std::norm(target.overlap(state)), 0.0, 1.0);
}

SectorPopulations sector_populations(const FullState& state) {
    SectorPopulations out;
    DigitCounter counter(state.atoms());
    for (std::size_t idx = 0; idx < state.dimension(); ++idx, counter.next()) {
        const auto& d = counter.digits();
        const auto excited = std::count_if(d.begin(), d.end(), [](int x) { return x != 0; });
        const double p = std::norm(state[idx]);
        if (excited == 0) out.none += p;
        else if (excited == 1) out.single += p;
        else out.multiple += p;
    }
    return out;
}

std::vector<double> single_excitation_shares(const FullState& state) {
    std::vector<double> out(state.atoms());
    for (std::size_t i = 0; i < state.atoms(); ++i)
        out[i] = std::norm(state[state.single_index(i, 1)]) + std::norm(state[state.single_index(i, 2)]);
    return out;
}

std::vector<double> multiple_excitation_shares(const FullState& state) {
    std::vector<double> out(state.atoms(), 0.0);
    DigitCounter counter(state.atoms());
    for (std::size_t idx = 0; idx < state.dimension(); ++idx, counter.next()) {
        const auto& d = counter.digits();
        const auto excited = std::count_if(d.begin(), d.end(), [](int x) { return x != 0; });
        if (excited < 2) continue;
        const double share = std::norm(state[idx]) / static_cast<double>(excited);
        for (std::size_t a = 0; a < state.atoms(); ++a)
            if (d[a] != 0) out[a] += share;
    }
    return out;
}

}  // namespace rydberg
