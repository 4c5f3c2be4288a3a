#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include <rydberg/control.hpp>
#include <rydberg/emission.hpp>

#include "oracles.hpp"

using namespace rydberg;

namespace {

ApproxWState frozen_equal(std::vector<Vec3> positions, const Vec3& k0, double ke = kEmissionWavenumber) {
    ApproxWState s;
    const double a = 1.0 / std::sqrt(static_cast<double>(positions.size()));
    s.amplitudes.assign(positions.size(), Complex(a));
    s.velocities.assign(positions.size(), Vec3::Zero());
    s.positions = std::move(positions);
    s.k0 = k0;
    s.ke = ke;
    return s;
}

Vec3 random_direction(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vec3 v(g(rng), g(rng), g(rng));
    return v.normalized();
}

ApproxWState phased_cloud(std::size_t n, std::uint64_t seed) {
    auto s = frozen_equal(sample_cloud(n, 1.06, seed, {0.0, 100}).positions, Vec3(0, 0, kEmissionWavenumber));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.5, 1.0);
    for (auto& a : s.amplitudes) a *= u(rng);
    return s;
}

const double kIsotropicCone = (1.0 - std::cos(0.3)) / 2.0;

}  // namespace

TEST(Intensity, SingleAtomIsotropic) {
    const auto s = frozen_equal({Vec3(0.1, 0.2, 0.3)}, Vec3(0, 0, 7.0));
    std::mt19937_64 rng(1);
    const double ref = angular_intensity(s, Vec3::UnitZ(), 0.0);
    double lo = ref, hi = ref;
    for (int k = 0; k < 200; ++k) {
        const double v = angular_intensity(s, random_direction(rng), 3.0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    EXPECT_LT(hi / lo - 1.0, 1e-10);
    EXPECT_NEAR(directionality_p(s), kIsotropicCone, 1e-3);
    // Every node of a product grid sees the same intensity.
    EmissionOptions o;
    o.total = SphereTotal::Grid;
    EXPECT_NEAR(directionality_p(s, o), kIsotropicCone, 1e-3);
}

TEST(Intensity, PhaseMatchedForwardPeak) {
    const std::size_t n = 12;
    auto s = frozen_equal(sample_cloud(n, 1.0, 5).positions, Vec3(0, 0, kEmissionWavenumber));
    // Equal envelopes: the imprinted phases cancel the propagation phases along k0.
    EXPECT_NEAR(angular_intensity(s, Vec3::UnitZ(), 0.0), static_cast<double>(n) * s.excited_population(), 1e-10);
}

TEST(Intensity, TwoEmitterClosedForm) {
    const Vec3 r1(0.1, -0.3, 0.2), r2(-0.2, 0.25, -0.15), k0(0.0, 0.0, 8.0);
    const auto s = frozen_equal({r1, r2}, k0);
    std::mt19937_64 rng(2);
    for (int k = 0; k < 50; ++k) {
        const Vec3 n = random_direction(rng);
        EXPECT_NEAR(angular_intensity(s, n, 0.0), oracle::two_emitter_intensity(0.5, k0, s.ke, n, r1, r2), 1e-12);
    }
    EXPECT_NEAR(total_intensity(s, 0.0), [&] {
        const double kd = s.ke * (r1 - r2).norm();
        return 4.0 * kPi * (1.0 + std::cos(k0.dot(r1 - r2)) * std::sin(kd) / kd);
    }(), 1e-10);
}

TEST(Directionality, TranslationAndGlobalPhaseInvariance) {
    auto s = phased_cloud(30, 3);
    s.velocities.assign(30, Vec3(0.0, 0.0, 0.0));
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 200.0);
    for (auto& v : s.velocities) v = Vec3(g(rng), g(rng), g(rng));
    const double p = directionality_p(s);

    auto moved = s;
    for (auto& r : moved.positions) r += Vec3(3.0, -1.5, 0.7);
    EXPECT_NEAR(directionality_p(moved), p, 1e-10);

    auto rotated = s;
    for (auto& a : rotated.amplitudes) a *= std::exp(Complex(0.0, 1.234));
    EXPECT_NEAR(directionality_p(rotated), p, 1e-10);
}

TEST(Directionality, IncreasesWithConeAngle) {
    const auto s = phased_cloud(40, 6);
    double previous = 0.0;
    for (double alpha : {0.05, 0.1, 0.2, 0.3, 0.5, 1.0, 2.0}) {
        EmissionOptions o;
        o.cone_half_angle = alpha;
        const double p = directionality_p(s, o);
        EXPECT_GT(p, previous);
        EXPECT_LE(p, 1.0);
        previous = p;
    }
}

TEST(Directionality, GridRefinementAndSphereTotals) {
    auto s = frozen_equal(sample_cloud(25, 1.06, 8).positions, Vec3(0, 0, kEmissionWavenumber));
    EmissionOptions coarse;
    coarse.average = TimeAverage::Snapshot;
    EmissionOptions fine = coarse;
    fine.cone_polar *= 10;
    fine.cone_azimuthal *= 10;
    EXPECT_NEAR(directionality_p(s, coarse), directionality_p(s, fine), 1e-3);
    EmissionOptions grid = coarse;
    grid.total = SphereTotal::Grid;
    grid.grid_polar = 400;
    grid.grid_azimuthal = 200;
    const auto a = directionality(s, coarse), b = directionality(s, grid);
    EXPECT_NEAR(a.total / b.total, 1.0, 1e-3);
}

TEST(Directionality, GrowsWithAtomNumber) {
    double previous = kIsotropicCone;
    for (std::size_t n : {10, 40, 160, 640}) {
        const auto s = frozen_equal(sample_cloud(n, 1.06, 10 + n, {0.0, 100}).positions,
                                    Vec3(0, 0, kEmissionWavenumber));
        const double p = directionality_p(s);
        EXPECT_GT(p, previous) << n;
        previous = p;
    }
}

TEST(Directionality, MotionDephasesTowardIsotropic) {
    const auto base = frozen_equal(sample_cloud(200, 1.06, 12, {0.0, 100}).positions, Vec3(0, 0, kEmissionWavenumber));
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    std::vector<Vec3> unit(base.atoms());
    for (auto& u : unit) u = Vec3(g(rng), g(rng), g(rng));
    double previous = 1.0, p = 1.0;
    // Early emission (t below the dephasing time d / sigma) stays coherent, so
    // the isotropic limit needs velocities far beyond thermal ones.
    for (double sigma : {0.0, 8.0, 64.0, 512.0, 20000.0}) {
        auto s = base;
        for (std::size_t i = 0; i < s.atoms(); ++i) s.velocities[i] = sigma * unit[i];
        p = directionality_p(s);
        EXPECT_LT(p, previous) << sigma;
        previous = p;
    }
    EXPECT_NEAR(p / kIsotropicCone, 1.0, 0.2);
}

TEST(AngularDistribution, NormalisedAndNonNegative) {
    const auto s = phased_cloud(20, 14);
    EmissionOptions o;
    o.grid_polar = 100;
    o.grid_azimuthal = 50;
    const auto r = angular_distribution(s, o);
    double integral = 0.0, solid = 0.0;
    for (std::size_t d = 0; d < r.intensity.size(); ++d) {
        EXPECT_GE(r.intensity[d], 0.0);
        integral += r.grid.weights[d] * r.intensity[d];
        solid += r.grid.weights[d];
    }
    EXPECT_NEAR(integral, 1.0, 1e-12);
    EXPECT_NEAR(solid, 4.0 * kPi, 1e-10);
    EXPECT_GE(r.p, 0.0);
    EXPECT_LE(r.p, 1.0);
}

TEST(EmissionQuadrature, TimeNodes) {
    EmissionOptions o;
    const auto t = emission_time_nodes(o);
    EXPECT_NEAR(std::accumulate(t.w.begin(), t.w.end(), 0.0), 1.0, 1e-14);
    for (double x : t.t) {
        EXPECT_GE(x, 0.0);
        EXPECT_LE(x, o.decay_window);
    }
    // Oracle: the weighted mean time of exp(-t/tau) on [0, W].
    const double w = o.decay_window, tau = o.tau;
    const double mean_t = tau - w * std::exp(-w / tau) / (1.0 - std::exp(-w / tau));
    EXPECT_NEAR(std::inner_product(t.t.begin(), t.t.end(), t.w.begin(), 0.0), mean_t, 1e-10);
    o.average = TimeAverage::Snapshot;
    const auto snap = emission_time_nodes(o);
    ASSERT_EQ(snap.t.size(), 1u);
    EXPECT_EQ(snap.t[0], w);
    EXPECT_EQ(snap.w[0], 1.0);
}

TEST(EmissionQuadrature, ConeGridSolidAngle) {
    const auto g = cone_grid(0.3, 16, 64, Vec3(1, 1, 0).normalized());
    EXPECT_NEAR(std::accumulate(g.weights.begin(), g.weights.end(), 0.0), kTwoPi * (1.0 - std::cos(0.3)), 1e-12);
    for (const auto& n : g.directions) EXPECT_GE(n.dot(Vec3(1, 1, 0).normalized()), std::cos(0.3) - 1e-12);
}

TEST(EmissionValidation, RejectsBadInput) {
    const auto s = frozen_equal({Vec3::Zero()}, Vec3::UnitZ());
    EmissionOptions o;
    o.cone_half_angle = 0.0;
    EXPECT_THROW(directionality(s, o), DomainError);
    EXPECT_THROW(angular_intensity(s, Vec3(0, 0, 2), 0.0), DomainError);
    EXPECT_THROW(directionality(ApproxWState{}), DomainError);
}

TEST(PrepareW, FrozenUniformModuli) {
    const auto cloud = sample_cloud(30, 1.0, 15);
    const auto model = PhysicalModel::rubidium87(LaserGeometry::AntiParallel);
    const auto s = prepare_w(cloud, model, gaussian_pi_guess(2.5, 30, 2001), 2000);
    const double first = std::abs(s.amplitudes[0]);
    for (const auto& a : s.amplitudes) EXPECT_NEAR(std::abs(a), first, 1e-6);
    EXPECT_NEAR(std::norm(s.ground) + s.rydberg_population + s.excited_population(), 1.0, 1e-9);
    EXPECT_GT(s.excited_population(), 0.99);
    EXPECT_EQ(s.k0, model.imprint_wavevector());
}

TEST(PrepareW, DopplerSuppressionIsLorentzian) {
    // Flat g-r drive followed by a strong r-e kick; averaged over durations
    // the excited share follows Omega^2 / (Omega^2 + delta^2).
    auto model = PhysicalModel::rubidium87(LaserGeometry::Parallel);
    model.delta_ir = model.delta_re = 0.0;
    const double omega = 2.0;
    const double k = model.two_photon_wavevector().norm();
    auto mean_excited = [&](double delta) {
        auto atom = make_chain(1, 0.35);
        atom.velocities[0] = Vec3(0, 0, delta / (k * 1e-3));
        double sum = 0.0;
        const int samples = 24;
        for (int j = 0; j < samples; ++j) {
            const double drive = 4.0 + 0.37 * j;
            const double duration = drive + 0.1;
            const auto pulse = ControlPulse::sample(duration, 20'001, [&](double t) {
                const bool kick = t > drive + 0.025 && t < drive + 0.075;
                return std::pair{Complex(t < drive ? omega : 0.0), Complex(kick ? kPi / 0.05 : 0.0)};
            });
            sum += prepare_w(atom, model, pulse, 20'000).excited_population();
        }
        return sum / samples;
    };
    const double resonant = mean_excited(0.0);
    for (double ratio : {2.0, 3.0}) {
        const double lorentz = 1.0 / (1.0 + ratio * ratio);
        EXPECT_NEAR(mean_excited(ratio * omega) / resonant / lorentz, 1.0, 0.3) << ratio;
    }
}

TEST(PrepareW, AntiParallelExcitesMore) {
    const auto cloud = thermal_velocities(sample_cloud(60, 1.0, 16), 220.0, 17);
    const auto pulse = gaussian_pi_guess(2.5, 60, 2001);
    const auto par = prepare_w(cloud, PhysicalModel::rubidium87(LaserGeometry::Parallel), pulse, 2000);
    const auto anti = prepare_w(cloud, PhysicalModel::rubidium87(LaserGeometry::AntiParallel), pulse, 2000);
    EXPECT_GT(anti.excited_population(), par.excited_population());
}

TEST(TemperatureSweep, DeterministicAcrossWorkerCounts) {
    DirectionalitySweepOptions o;
    o.temperatures_c = {200.0, 230.0};
    o.radius = 0.3;
    o.realizations = 3;
    o.n_steps = 300;
    o.emission.cone_polar = 6;
    o.emission.cone_azimuthal = 16;
    o.emission.time_nodes_per_panel = 2;
    const double duration = 2.5;
    std::vector<SweepPulse> pulses{
        {"optimized", [&](double m) { return flat_kick_pulse(FlatKickTemplate::pi_areas(duration), duration, m, 301); },
         false},
        {"gaussian", [&](double m) { return gaussian_pi_guess(duration, std::max<std::size_t>(1, std::lround(m)), 301); },
         true}};
    o.workers = 1;
    const auto a = temperature_sweep(pulses, o);
    o.workers = 3;
    const auto b = temperature_sweep(pulses, o);
    ASSERT_EQ(a.rows.size(), 2u * 2u * 2u);
    ASSERT_EQ(a.records.size(), 2u * 2u * 2u * 3u);
    for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_EQ(a.records[i].p, b.records[i].p);
    const auto& row = a.row(230.0, LaserGeometry::AntiParallel, "gaussian");
    EXPECT_NEAR(row.radius, 0.3 * o.reduced_radius_factor, 1e-15);
    EXPECT_EQ(row.realizations, 3u);
    EXPECT_THROW(a.row(210.0, LaserGeometry::Parallel, "gaussian"), std::out_of_range);
}
