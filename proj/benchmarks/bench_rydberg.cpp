#include <benchmark/benchmark.h>

#include <rydberg/analytics.hpp>
#include <rydberg/control.hpp>
#include <rydberg/dynamics.hpp>
#include <rydberg/emission.hpp>
#include <rydberg/ensemble.hpp>

using namespace rydberg;

namespace {

// Full 3^N evolution of a chain under the Gaussian guess, 2500 steps.
void BM_EvolveFull(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    StatePreparationProblem problem{PhysicalModel::rubidium87(LaserGeometry::Parallel), make_chain(n, 0.35)};
    problem.n_steps = 2500;
    const auto pulse = gaussian_pi_guess(2.5, n, 2501);
    for (auto _ : state) benchmark::DoNotOptimize(full_infidelity(problem, pulse));
    state.counters["dim"] = static_cast<double>(pow3(n));
}
BENCHMARK(BM_EvolveFull)->DenseRange(2, 8)->Unit(benchmark::kMillisecond);

// Perfect-blockade sector with Doppler shifts, 4000 steps.
void BM_EvolveRestricted(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto cloud = thermal_velocities(sample_cloud(n, 2.0, 1, {0.0, 10}), rb87_velocity_width(220.0), 2);
    const auto model = PhysicalModel::rubidium87(LaserGeometry::AntiParallel);
    const auto pulse = flat_kick_pulse(FlatKickTemplate::pi_areas(2.5), 2.5, static_cast<double>(n), 4001);
    for (auto _ : state) benchmark::DoNotOptimize(evolve_restricted(cloud, model, pulse, {4000, true, true}).norm());
}
BENCHMARK(BM_EvolveRestricted)->RangeMultiplier(4)->Range(16, 1024)->Unit(benchmark::kMillisecond);

// Time-averaged cone fraction for a thermal sphere at the given temperature.
void BM_Directionality(benchmark::State& state) {
    const double celsius = static_cast<double>(state.range(0));
    const auto ensemble = atoms_in_sphere(celsius, 0.53, 3);
    const auto model = PhysicalModel::rubidium87(LaserGeometry::AntiParallel);
    const double mean = vapor_conditions(celsius).density * 4.0 / 3.0 * kPi * 0.53 * 0.53 * 0.53;
    const auto w = prepare_w(ensemble, model, flat_kick_pulse(FlatKickTemplate::pi_areas(2.5), 2.5, mean, 4001), 4000);
    for (auto _ : state) benchmark::DoNotOptimize(directionality_p(w));
    state.counters["atoms"] = static_cast<double>(w.atoms());
}
BENCHMARK(BM_Directionality)->Arg(200)->Arg(230)->Arg(260)->Unit(benchmark::kMillisecond);

void BM_ContinuumQuadrature(benchmark::State& state) {
    const BlockadeErrorModel m{1.0, 1.0, 10};
    for (auto _ : state) benchmark::DoNotOptimize(continuum_p(0.5, m).value);
}
BENCHMARK(BM_ContinuumQuadrature)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
