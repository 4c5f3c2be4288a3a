#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rydberg/units.hpp"

namespace rydberg {

using Vec3 = Eigen::Vector3d;
using Complex = std::complex<double>;
using Matrix3c = Eigen::Matrix3cd;

enum class LaserGeometry { Parallel, AntiParallel };

/// Wavelengths of the three excitation lasers (um). Laser 1 drives g->i,
/// laser 2 i->r, laser 3 r->e.
struct LaserWavelengths {
    double first = 0.780;
    double second = 0.480;
    double third = 0.475;
};

/// Parameters of the effective three-level (g, r, e) model. All frequencies
/// in rad/ns, lengths in um, lifetimes in ns. Wavevectors are signed and
/// carry the propagation direction of each beam.
struct PhysicalModel {
    double omega1 = 0.0;
    double omega2 = 0.0;
    double omega3 = 0.0;
    double delta_gi = 0.0;
    double delta_ir = 0.0;
    double delta_re = 0.0;
    double c6 = mhz_to_rad_per_ns(5880.0);
    double tau1 = 26.2;
    double tau2 = 27.7;
    Vec3 k1 = Vec3::Zero();
    Vec3 k2 = Vec3::Zero();
    Vec3 k3 = Vec3::Zero();
    LaserGeometry geometry = LaserGeometry::AntiParallel;
    // Carried for documentation only; the coherent model does not use it.
    double rydberg_linewidth = mhz_to_rad_per_ns(2.0);

    /// Rubidium-87 defaults: lasers 1 and 3 along +z, laser 2 along +z
    /// (parallel) or -z (anti-parallel). Laser 3 follows laser 2 so the
    /// imprinted wavevector points along +z in both geometries.
    static PhysicalModel rubidium87(LaserGeometry geometry,
                                    const LaserWavelengths& wavelengths = {});

    /// k1 + k2 with k2 signed by the geometry.
    Vec3 two_photon_wavevector() const { return k1 + k2; }
    /// Net wavevector of the spatial phase imprinted on |e_i>: k1 + k2 - k3.
    Vec3 imprint_wavevector() const { return k1 + k2 - k3; }

    /// Throws DomainError on violated hard invariants (c6, lifetimes,
    /// non-finite wavevectors, geometry flag inconsistent with sign of k1.k2).
    void validate() const;
    /// Validity of adiabatic elimination of |i>: |delta_gi| dominates
    /// omega1, omega2 and delta_ir. A violation is only a warning.
    bool adiabatic_elimination_valid() const;
};

/// Two-photon coupling after eliminating the intermediate level.
double effective_rabi(double omega1, double omega2, double delta_gi);

/// Single-atom Hamiltonian in the basis (|g>, |r>, |e>).
/// Element (r,g) is omega_gr/2, (e,r) is omega_re/2; the conjugates sit
/// opposite. Diagonal: (0, delta_ir + doppler_shift, delta_re).
struct LocalHamiltonian {
    Matrix3c matrix = Matrix3c::Zero();

    bool is_hermitian(double rel_tol = 1e-12) const;
};

LocalHamiltonian build_local(const PhysicalModel& model, Complex omega_gr,
                             Complex omega_re, double doppler_shift);

/// Two-photon Doppler detuning (k1 + k2).v in rad/ns; velocity in m/s.
double doppler_shift(const PhysicalModel& model, const Vec3& velocity_mps);

/// Pairwise van der Waals shifts V_ij = c6 / r_ij^6 on |r_i r_j>.
class InteractionTable {
public:
    InteractionTable() = default;
    InteractionTable(std::span<const Vec3> positions, double c6);

    std::size_t size() const { return n_; }
    double shift(std::size_t i, std::size_t j) const { return shift_[index(i, j)]; }
    double distance(std::size_t i, std::size_t j) const { return distance_[index(i, j)]; }

    /// Returns a copy with every shift multiplied by `factor`.
    InteractionTable scaled(double factor) const;

private:
    std::size_t index(std::size_t i, std::size_t j) const;

    std::size_t n_ = 0;
    std::vector<double> shift_;
    std::vector<double> distance_;
};

InteractionTable build_interactions(std::span<const Vec3> positions, double c6);

}  // namespace rydberg
