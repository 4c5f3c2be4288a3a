#pragma once

#include <span>
#include <vector>

#include "rydberg/ensemble.hpp"
#include "rydberg/model.hpp"
#include "rydberg/pulse.hpp"

namespace rydberg {

inline constexpr std::size_t kMaxFullAtoms = 14;
inline constexpr std::size_t kDefaultTrotterSteps = 10'000;

/// Per-atom modification of the common drive: laser phases on the two
/// couplings and an extra detuning of |r>.
struct AtomDrive {
    double phase_gr = 0.0;  // <r|H|g> = omega_gr e^{i phase_gr} / 2
    double phase_re = 0.0;  // <e|H|r> = omega_re e^{i phase_re} / 2
    double detuning = 0.0;  // added to delta_ir

    bool operator==(const AtomDrive&) const = default;
};

struct DriveOptions {
    bool imprint_phases = false;
    bool doppler = false;
};

/// Spatial phases (k1 + k2).r_i and -k3.r_i, and Doppler detunings from
/// the velocities (m/s). Velocities may be empty when doppler is off.
std::vector<AtomDrive> laser_drives(const PhysicalModel& model, std::span<const Vec3> positions,
                                    std::span<const Vec3> velocities, const DriveOptions& options);

/// State vector over the 3^N product basis. Basis index = sum_i d_i 3^i with
/// d_i in {g=0, r=1, e=2}; atom 0 is the least significant digit.
class FullState {
public:
    FullState() = default;
    FullState(std::size_t atoms, std::vector<Complex> amplitudes);

    static FullState ground(std::size_t atoms);

    std::size_t atoms() const { return atoms_; }
    std::size_t dimension() const { return amps_.size(); }
    std::span<Complex> amplitudes() { return amps_; }
    std::span<const Complex> amplitudes() const { return amps_; }
    Complex& operator[](std::size_t i) { return amps_[i]; }
    const Complex& operator[](std::size_t i) const { return amps_[i]; }

    double norm() const;
    /// Index of the state with atom `i` in level `level` and all others in g.
    std::size_t single_index(std::size_t i, int level) const;
    static int digit(std::size_t index, std::size_t atom);

    /// Amplitudes of |r_0..r_{N-1}> followed by |e_0..e_{N-1}>.
    std::vector<Complex> single_excitation_amplitudes() const;

private:
    std::size_t atoms_ = 0;
    std::vector<Complex> amps_;
};

std::size_t pow3(std::size_t n);

/// Second-order split-step propagation over the pulse duration with
/// `n_steps` uniform steps: interaction phase half steps outermost, local
/// 3x3 unitaries evaluated at step midpoints in between. `drives` is either
/// empty (uniform drive) or one entry per atom.
void evolve_full(FullState& state, const PhysicalModel& model, const ControlPulse& pulse,
                 const InteractionTable& interactions, std::span<const AtomDrive> drives,
                 std::size_t n_steps = kDefaultTrotterSteps);

FullState evolve_full(const FullState& state, const PhysicalModel& model,
                      const ControlPulse& pulse, std::span<const Vec3> positions,
                      std::size_t n_steps = kDefaultTrotterSteps);

/// exp(-i H dt) of a single-atom Hamiltonian.
Matrix3c local_propagator(const Matrix3c& hamiltonian, double dt);

/// Ground state plus the 2N single-excitation states |r_i>, |e_i>.
/// Storage order: [G, r_0..r_{N-1}, e_0..e_{N-1}].
class RestrictedState {
public:
    RestrictedState() = default;
    explicit RestrictedState(std::size_t atoms);

    std::size_t atoms() const { return atoms_; }
    std::size_t dimension() const { return amps_.size(); }
    Complex& ground() { return amps_[0]; }
    const Complex& ground() const { return amps_[0]; }
    Complex& rydberg(std::size_t i) { return amps_[1 + i]; }
    const Complex& rydberg(std::size_t i) const { return amps_[1 + i]; }
    Complex& excited(std::size_t i) { return amps_[1 + atoms_ + i]; }
    const Complex& excited(std::size_t i) const { return amps_[1 + atoms_ + i]; }
    std::span<Complex> amplitudes() { return amps_; }
    std::span<const Complex> amplitudes() const { return amps_; }

    double norm() const;
    std::vector<Complex> single_excitation_amplitudes() const;

private:
    std::size_t atoms_ = 0;
    std::vector<Complex> amps_;
};

struct RestrictedOptions {
    std::size_t n_steps = kDefaultTrotterSteps;
    bool doppler = true;
    bool imprint_phases = true;
};

/// Perfect-blockade evolution from |G> in the {G, r_i, e_i} sector. Each
/// step applies the exact exponential of the midpoint Hamiltonian (Taylor
/// series with sub-stepping on the O(N) structured matrix-vector product).
RestrictedState evolve_restricted(const AtomEnsemble& ensemble, const PhysicalModel& model,
                                  const ControlPulse& pulse, const RestrictedOptions& options = {});

RestrictedState evolve_restricted(RestrictedState state, const PhysicalModel& model,
                                  const ControlPulse& pulse, std::span<const AtomDrive> drives,
                                  std::size_t n_steps);

/// |W> = (1/sqrt N) sum_i e^{i k0.r_i} |e_i>.
class WTarget {
public:
    WTarget(std::span<const Vec3> positions, const Vec3& k0);
    /// Phase-free symmetric target.
    static WTarget symmetric(std::size_t atoms);

    std::size_t atoms() const { return coeffs_.size(); }
    std::span<const Complex> coefficients() const { return coeffs_; }

    Complex overlap(const FullState& state) const;
    Complex overlap(const RestrictedState& state) const;
    FullState as_full_state() const;

private:
    explicit WTarget(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {}
    std::vector<Complex> coeffs_;
};

double infidelity(const FullState& state, const WTarget& target);
double infidelity(const RestrictedState& state, const WTarget& target);

struct SectorPopulations {
    double none = 0.0;
    double single = 0.0;
    double multiple = 0.0;
};

/// Probabilities of 0, 1 and >= 2 atoms outside |g>.
SectorPopulations sector_populations(const FullState& state);

/// Population of the single-excitation states with atom i excited (r or e).
std::vector<double> single_excitation_shares(const FullState& state);
/// Population of states with >= 2 excitations, split evenly among the
/// excited atoms of each basis state; sums to SectorPopulations::multiple.
std::vector<double> multiple_excitation_shares(const FullState& state);

}  // namespace rydberg
