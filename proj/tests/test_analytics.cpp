#include <cmath>

#include <gtest/gtest.h>

#include <rydberg/analytics.hpp>
#include <rydberg/control.hpp>

#include "oracles.hpp"

using namespace rydberg;

TEST(DiscreteModel, Examples) {
    const double d = 0.8;
    const std::vector<Vec3> pair{Vec3::Zero(), Vec3(d, 0.0, 0.0)};
    const auto unit = discrete_double_excitation(pair, 1.0 / std::pow(d, 6));
    EXPECT_NEAR(unit[0], 0.25, 1e-14);
    EXPECT_NEAR(unit[1], 0.25, 1e-14);
    for (double p : discrete_double_excitation(pair, 1e30)) EXPECT_LT(p, 1e-40);
    const auto chain = make_chain(4, 0.5).positions;
    for (double p : discrete_double_excitation(chain, 1e-12)) EXPECT_NEAR(p, 0.25, 1e-12);
    EXPECT_ANY_THROW(discrete_double_excitation(std::vector<Vec3>{Vec3::Zero(), Vec3::Zero()}, 1.0));
}

TEST(DiscreteModel, BoundsAndSymmetry) {
    const std::vector<Vec3> triangle{Vec3(1, 0, 0), Vec3(-0.5, std::sqrt(3) / 2, 0), Vec3(-0.5, -std::sqrt(3) / 2, 0)};
    const auto p = discrete_double_excitation(triangle, 0.7);
    EXPECT_NEAR(p[0], p[1], 1e-15);
    EXPECT_NEAR(p[0], p[2], 1e-15);
    const auto cloud = sample_cloud(9, 1.2, 4).positions;
    for (double v : discrete_double_excitation(cloud, 2.0)) {
        EXPECT_GT(v, 0.0);
        EXPECT_LE(v, 1.0 / 8.0);
    }
}

TEST(ContinuumModel, UncoupledLimits) {
    const BlockadeErrorModel m{1e-9, 0.8, 10};
    QuadratureOptions printed;
    printed.measure = SphereMeasure::Printed;
    EXPECT_NEAR(continuum_p(0.3, m).value, 0.1, 1e-6);
    EXPECT_NEAR(continuum_p(0.3, m, printed).value, kPi / 40.0, 1e-6);
    EXPECT_NEAR(continuum_p_uncoupled(m), 0.1, 1e-14);
    EXPECT_NEAR(continuum_p_uncoupled(m, printed), kPi / 40.0, 1e-14);
    QuadratureOptions volume;
    volume.normalization = ContinuumNormalization::Volume;
    EXPECT_NEAR(continuum_p(0.0, m, volume).value, 1.0, 1e-6);
}

TEST(ContinuumModel, MonteCarloOracle) {
    const double radius = 1.0, c = 1.0;
    const BlockadeErrorModel m{c, radius, 10};
    const auto q = continuum_p(0.0, m);
    const auto [mc, se] = oracle::blockade_integral_mc(0.0, c, radius, 10, 1'000'000, 17);
    EXPECT_LT(std::abs(q.value - mc), 3.0 * std::hypot(se, q.error));
    const auto q_edge = continuum_p(0.7, m);
    const auto [mc_edge, se_edge] = oracle::blockade_integral_mc(0.7, c, radius, 10, 1'000'000, 18);
    EXPECT_LT(std::abs(q_edge.value - mc_edge), 3.0 * std::hypot(se_edge, q_edge.error));
}

TEST(ContinuumModel, MonotoneAndStable) {
    const double radius = 1.0;
    double previous = 1.0;
    for (double c : {0.1, 0.3, 1.0, 3.0, 10.0, 100.0}) {
        const BlockadeErrorModel m{c, radius, 8};
        const double p0 = continuum_p(0.0, m).value;
        EXPECT_LE(p0, previous);
        EXPECT_LE(continuum_p(radius, m).value, p0);
        QuadratureOptions tight;
        tight.rel_tol = 1e-6;
        EXPECT_NEAR(continuum_p(0.4, m, tight).value / continuum_p(0.4, m).value, 1.0, 1e-3);
        previous = p0;
    }
    EXPECT_LT(continuum_p(0.2, {1e30, radius, 8}).value, 1e-12);
    EXPECT_THROW(continuum_p(1.5, {1.0, radius, 8}), DomainError);
    EXPECT_THROW(continuum_p(0.5, {1.0, radius, 1}), DomainError);
}

TEST(ContinuumModel, ReportsNonConvergence) {
    QuadratureOptions o;
    o.rel_tol = 1e-14;
    o.abs_tol = 0.0;
    o.max_depth = 1;
    EXPECT_THROW(continuum_p(0.3, {3.0, 1.0, 5}, o), NumericalError);
}

TEST(PoissonSensitivity, LimitsAndFirstOrderAgreement) {
    EXPECT_NEAR(poisson_pulse_sensitivity(100.0).approximation, 1.0 - kPi * kPi / 3200.0, 1e-15);
    EXPECT_NEAR(kPi * kPi / 3200.0, 3.08e-3, 1e-5);
    const auto big = poisson_pulse_sensitivity(1e12);
    EXPECT_NEAR(big.overlap_plus, 1.0, 1e-10);
    EXPECT_NEAR(big.approximation, 1.0, 1e-10);
    for (double n : {1e2, 1e3, 1e4}) {
        const auto s = poisson_pulse_sensitivity(n);
        const double approx = 1.0 - s.approximation;
        // Relative mismatch of the deviations is +-1/(2 sqrt N) to leading order.
        EXPECT_NEAR(std::abs((1.0 - s.overlap_plus) / approx - 1.0) * std::sqrt(n), 0.5, 0.1);
        EXPECT_NEAR(std::abs((1.0 - s.overlap_minus) / approx - 1.0) * std::sqrt(n), 0.5, 0.1);
    }
}

TEST(Pearson, Basic) {
    const std::vector<double> x{1, 2, 3, 4}, y{2, 4, 6, 8}, z{4, 3, 2, 1};
    EXPECT_NEAR(pearson(x, y), 1.0, 1e-15);
    EXPECT_NEAR(pearson(x, z), -1.0, 1e-15);
}

TEST(ModelVsSimulation, PairInPerturbativeRegime) {
    // Smoothly switched constant drive held for a collective pi rotation;
    // the doubly excited admixture is then Omega^2 / (2 V^2).
    auto model = PhysicalModel::rubidium87(LaserGeometry::Parallel);
    model.delta_ir = model.delta_re = 0.0;
    const double omega = 3.0, ramp = 0.2;
    const double duration = kPi / (std::sqrt(2.0) * omega) + 0.5 * ramp;
    const auto pulse = ControlPulse::sample(duration, 4001, [&](double t) {
        const double x = std::min(t / ramp, 1.0);
        return std::pair{Complex(omega * x * x * (3.0 - 2.0 * x)), Complex(0.0)};
    });
    const std::vector<Vec3> pos{Vec3::Zero(), Vec3(0.0, 0.0, 1.0)};
    const auto psi = oracle::propagate(model, pulse, pos, oracle::State::Unit(9, 0), 4000);
    const double p_rr = std::norm(psi(4));
    const auto p = discrete_double_excitation(pos, omega / model.c6);
    EXPECT_NEAR((0.5 - p[0]) / p_rr, 1.0, 0.25);
}

TEST(ModelVsSimulation, StrongBlockadeBothVanish) {
    const auto model = PhysicalModel::rubidium87(LaserGeometry::Parallel);
    const auto cloud = sample_cloud(5, 0.5, 21);
    ComparisonOptions o;
    o.n_steps = 2500;
    const auto r = model_vs_simulation(cloud, model, gaussian_pi_guess(2.5, 5, 2501), o);
    ASSERT_EQ(r.atoms.size(), 5u);
    for (const auto& a : r.atoms) {
        EXPECT_LT(std::abs(a.simulated_missing), 1e-2);
        EXPECT_LT(std::abs(a.continuum_missing), 1e-2);
        EXPECT_LE(a.radius, r.cloud_radius);
    }
    EXPECT_LT(r.rms_deviation, 1e-2);
    EXPECT_NEAR(r.coupling_c, gaussian_pi_guess(2.5, 5, 2501).peak_gr() / model.c6, 1e-15);
}
