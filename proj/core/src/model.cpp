#include "rydberg/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rydberg {

PhysicalModel PhysicalModel::rubidium87(LaserGeometry geometry,
                                        const LaserWavelengths& wavelengths) {
    PhysicalModel model;
    model.geometry = geometry;
    model.delta_gi = mhz_to_rad_per_ns(2000.0);
    const Vec3 z = Vec3::UnitZ();
    const double sign = geometry == LaserGeometry::Parallel ? 1.0 : -1.0;
    model.k1 = wavenumber(wavelengths.first) * z;
    model.k2 = sign * wavenumber(wavelengths.second) * z;
    model.k3 = sign * wavenumber(wavelengths.third) * z;
    return model;
}

void PhysicalModel::validate() const {
    if (!(c6 > 0.0)) throw DomainError("c6 must be positive");
    if (!(tau1 > 0.0) || !(tau2 > 0.0)) throw DomainError("lifetimes must be positive");
    if (!k1.allFinite() || !k2.allFinite() || !k3.allFinite())
        throw DomainError("laser wavevectors must be finite");
    const double dot = k1.dot(k2);
    if (dot != 0.0) {
        const bool parallel = dot > 0.0;
        if (parallel != (geometry == LaserGeometry::Parallel))
            throw DomainError("laser geometry flag inconsistent with sign of k1.k2");
    }
}

bool PhysicalModel::adiabatic_elimination_valid() const {
    const double bound = std::max({std::abs(omega1), std::abs(omega2), std::abs(delta_ir)});
    return std::abs(delta_gi) > bound;
}

double effective_rabi(double omega1, double omega2, double delta_gi) {
    if (delta_gi == 0.0) throw DomainError("effective_rabi: zero intermediate detuning");
    return -omega1 * omega2 / (2.0 * delta_gi);
}

LocalHamiltonian build_local(const PhysicalModel& model, Complex omega_gr,
                             Complex omega_re, double doppler_shift) {
    LocalHamiltonian h;
    auto& m = h.matrix;
    m(1, 0) = 0.5 * omega_gr;
    m(0, 1) = std::conj(m(1, 0));
    m(2, 1) = 0.5 * omega_re;
    m(1, 2) = std::conj(m(2, 1));
    m(1, 1) = model.delta_ir + doppler_shift;
    m(2, 2) = model.delta_re;
    return h;
}

bool LocalHamiltonian::is_hermitian(double rel_tol) const {
    const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

double doppler_shift(const PhysicalModel& model, const Vec3& velocity_mps) {
    return model.two_photon_wavevector().dot(velocity_mps * mps_to_um_per_ns(1.0));
}

InteractionTable::InteractionTable(std::span<const Vec3> positions, double c6)
    : n_(positions.size()) {
    if (!(c6 > 0.0)) throw DomainError("c6 must be positive");
    const std::size_t pairs = n_ < 2 ? 0 : n_ * (n_ - 1) / 2;
    shift_.reserve(pairs);
    distance_.reserve(pairs);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double r = (positions[i] - positions[j]).norm();
            if (!(r > 0.0))
                throw DomainError("coincident atoms " + std::to_string(i) + " and " +
                                  std::to_string(j) + ": interaction is singular");
            const double r2 = r * r;
            shift_.push_back(c6 / (r2 * r2 * r2));
            distance_.push_back(r);
        }
    }
}

std::size_t InteractionTable::index(std::size_t i, std::size_t j) const {
    if (i == j || i >= n_ || j >= n_) throw std::out_of_range("InteractionTable: bad pair");
    if (i > j) std::swap(i, j);
    // Row-major upper triangle without the diagonal.
    return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
}

InteractionTable InteractionTable::scaled(double factor) const {
    InteractionTable out = *this;
    for (auto& v : out.shift_) v *= factor;
    return out;
}

InteractionTable build_interactions(std::span<const Vec3> positions, double c6) {
    return InteractionTable(positions, c6);
}

}  // namespace rydberg
