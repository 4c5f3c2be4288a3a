#pragma once

// Reference computations that share no code with the library: dense
// Hamiltonians propagated through eigendecompositions, closed forms and
// plain Monte-Carlo.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include <rydberg/model.hpp>
#include <rydberg/pulse.hpp>

namespace oracle {

using rydberg::Complex;
using rydberg::Vec3;
using Dense = Eigen::MatrixXcd;
using State = Eigen::VectorXcd;

inline std::size_t power3(std::size_t n) {
    std::size_t d = 1;
    for (std::size_t i = 0; i < n; ++i) d *= 3;
    return d;
}

inline int level(std::size_t index, std::size_t atom) {
    for (std::size_t i = 0; i < atom; ++i) index /= 3;
    return static_cast<int>(index % 3);
}

/// Full 3^N Hamiltonian: uniform drives, detunings on r and e, C6/r^6 on
/// every doubly Rydberg-excited pair, optionally scaled.
inline Dense hamiltonian(const rydberg::PhysicalModel& m, Complex wgr, Complex wre, const std::vector<Vec3>& pos,
                         double interaction_scale = 1.0) {
    const std::size_t n = pos.size(), dim = power3(n);
    Dense h = Dense::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    std::size_t stride = 1;
    for (std::size_t a = 0; a < n; ++a, stride *= 3) {
        for (std::size_t s = 0; s < dim; ++s) {
            const int l = level(s, a);
            const auto S = static_cast<Eigen::Index>(s);
            if (l == 1) h(S, S) += m.delta_ir;
            if (l == 2) h(S, S) += m.delta_re;
            if (l == 0) {
                const auto R = static_cast<Eigen::Index>(s + stride);
                h(R, S) += wgr / 2.0;
                h(S, R) += std::conj(wgr) / 2.0;
            }
            if (l == 1) {
                const auto E = static_cast<Eigen::Index>(s + stride);
                h(E, S) += wre / 2.0;
                h(S, E) += std::conj(wre) / 2.0;
            }
        }
    }
    for (std::size_t s = 0; s < dim; ++s) {
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                if (level(s, a) == 1 && level(s, b) == 1) {
                    const double r = (pos[a] - pos[b]).norm();
                    h(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) +=
                        interaction_scale * m.c6 / std::pow(r, 6);
                }
            }
        }
    }
    return h;
}

inline Dense expm_hermitian(const Dense& h, double dt) {
    Eigen::SelfAdjointEigenSolver<Dense> es(h);
    const Eigen::VectorXcd phases =
        (es.eigenvalues().cast<Complex>() * Complex(0.0, -dt)).array().exp().matrix();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Midpoint exponential stepping of the exact Hamiltonian (no splitting).
inline State propagate(const rydberg::PhysicalModel& m, const rydberg::ControlPulse& pulse,
                       const std::vector<Vec3>& pos, State psi, std::size_t steps, double scale = 1.0) {
    const double dt = pulse.duration() / static_cast<double>(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        const auto [gr, re] = pulse.at((static_cast<double>(k) + 0.5) * dt);
        psi = expm_hermitian(hamiltonian(m, gr, re, pos, scale), dt) * psi;
    }
    return psi;
}

/// Richardson extrapolation of two midpoint runs: fourth-order accurate.
inline State reference(const rydberg::PhysicalModel& m, const rydberg::ControlPulse& pulse,
                       const std::vector<Vec3>& pos, std::size_t steps, double scale = 1.0) {
    State g = State::Zero(static_cast<Eigen::Index>(power3(pos.size())));
    g(0) = 1.0;
    const State coarse = propagate(m, pulse, pos, g, steps, scale);
    const State fine = propagate(m, pulse, pos, g, 2 * steps, scale);
    return (4.0 * fine - coarse) / 3.0;
}

/// Two equal frozen emitters: |a|^2 * 2 (1 + cos(q.(r1 - r2))), q = k0 - ke n.
inline double two_emitter_intensity(double a2, const Vec3& k0, double ke, const Vec3& n, const Vec3& r1,
                                    const Vec3& r2) {
    const Vec3 q = k0 - ke * n;
    return 2.0 * a2 * (1.0 + std::cos(q.dot(r1 - r2)));
}

/// Monte-Carlo estimate (mean, standard error) of the blockade integral
/// (1/(N V)) \int_ball d^3x 1/(1 + c^2 |x - r|^12) with r on the z axis.
inline std::pair<double, double> blockade_integral_mc(double r, double c, double radius, std::size_t atoms,
                                                      std::size_t samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-radius, radius);
    const double cube = std::pow(2.0 * radius, 3);
    const double volume = 4.0 / 3.0 * std::numbers::pi * std::pow(radius, 3);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const Vec3 x(u(rng), u(rng), u(rng));
        double f = 0.0;
        if (x.squaredNorm() <= radius * radius) {
            const double d2 = (x - Vec3(0, 0, r)).squaredNorm();
            f = cube / (1.0 + c * c * std::pow(d2, 6));
        }
        sum += f;
        sum2 += f * f;
    }
    const double mean = sum / static_cast<double>(samples);
    const double var = sum2 / static_cast<double>(samples) - mean * mean;
    const double norm = 1.0 / (static_cast<double>(atoms) * volume);
    return {norm * mean, norm * std::sqrt(var / static_cast<double>(samples))};
}

}  // namespace oracle
