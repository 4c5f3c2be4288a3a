#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rydberg/dynamics.hpp"
#include "rydberg/ensemble.hpp"
#include "rydberg/model.hpp"
#include "rydberg/pulse.hpp"

namespace rydberg {

inline const double kEmissionWavenumber = wavenumber(0.795);  // e -> g, rad/um

/// Single-excitation state left behind by the preparation pulse. The
/// amplitudes are envelopes: the imprinted phase e^{i k0.r_i(0)} is kept
/// separately in the emission kernel.
struct ApproxWState {
    std::vector<Complex> amplitudes;
    std::vector<Vec3> positions;   // um, at the end of the pulse
    std::vector<Vec3> velocities;  // m/s
    Vec3 k0 = Vec3::Zero();
    double ke = kEmissionWavenumber;
    Complex ground = 0.0;
    double rydberg_population = 0.0;  // left in |r_i>

    std::size_t atoms() const { return amplitudes.size(); }
    double excited_population() const;
    /// Emitter weights c_i = alpha_i e^{i k0.r_i(0)}.
    std::vector<Complex> emitters() const;
};

/// Restricted-sector evolution (Doppler on) followed by stripping the
/// imprinted phase from the |e_i> amplitudes.
ApproxWState prepare_w(const AtomEnsemble& ensemble, const PhysicalModel& model,
                       const ControlPulse& pulse, std::size_t n_steps = kDefaultTrotterSteps,
                       double ke = kEmissionWavenumber);

/// I(n, t) = |sum_i alpha_i exp(i k0.r_i(0) - i ke n.r_i(t))|^2 with
/// ballistic r_i(t) = r_i(0) + v_i t.
double angular_intensity(const ApproxWState& state, const Vec3& direction, double t);

/// 4 pi sum_ij c_i c_j* sinc(ke |r_i(t) - r_j(t)|): I integrated over the sphere.
double total_intensity(const ApproxWState& state, double t);

enum class TimeAverage { Window, Snapshot };
enum class SphereTotal { Analytic, Grid };

struct EmissionOptions {
    double cone_half_angle = 0.3;  // rad
    double decay_window = 100.0;   // ns
    double tau = 27.7;             // ns, weight exp(-t / tau)
    TimeAverage average = TimeAverage::Window;
    SphereTotal total = SphereTotal::Analytic;
    std::size_t cone_polar = 16;       // Gauss-Legendre nodes in cos(theta)
    std::size_t cone_azimuthal = 64;
    std::size_t grid_polar = 200;      // full-sphere product grid
    std::size_t grid_azimuthal = 100;
    std::size_t time_nodes_per_panel = 8;
};

/// Emission-time nodes on [0, window] (or the single snapshot time) with
/// weights proportional to exp(-t / tau), summing to one.
struct TimeNodes {
    std::vector<double> t;
    std::vector<double> w;
};
TimeNodes emission_time_nodes(const EmissionOptions& options);

struct AngularGrid {
    std::vector<Vec3> directions;
    std::vector<double> weights;  // solid angle, sums to 4 pi (or the cone)
};

/// Midpoint-in-cos(theta) x uniform-phi grid over the sphere, polar axis `axis`.
AngularGrid sphere_grid(std::size_t n_polar, std::size_t n_azimuthal, const Vec3& axis);
/// Gauss-Legendre in cos(theta) on [cos(alpha), 1] x uniform phi.
AngularGrid cone_grid(double half_angle, std::size_t n_polar, std::size_t n_azimuthal,
                      const Vec3& axis);

/// Forward direction: k0 normalised, +z when k0 vanishes.
Vec3 forward_axis(const ApproxWState& state);

struct Directionality {
    double p = 0.0;
    double cone = 0.0;   // time-averaged intensity integrated over the cone
    double total = 0.0;  // same over the sphere
};

Directionality directionality(const ApproxWState& state, const EmissionOptions& options = {});
inline double directionality_p(const ApproxWState& state, const EmissionOptions& options = {}) {
    return directionality(state, options).p;
}

struct EmissionResult {
    AngularGrid grid;
    std::vector<double> intensity;  // time-averaged, normalised to unit integral
    double p = 0.0;
    std::size_t atoms = 0;
    double excited_population = 0.0;
};

EmissionResult angular_distribution(const ApproxWState& state, const EmissionOptions& options = {});

/// Pulse for a cloud holding `mean_atoms` atoms on average.
using PulseFactory = std::function<ControlPulse(double mean_atoms)>;

struct SweepPulse {
    std::string tag;
    PulseFactory make;
    bool reduced_radius = false;
};

struct DirectionalitySweepOptions {
    std::vector<double> temperatures_c{200, 210, 220, 230, 240, 250, 260};
    std::vector<LaserGeometry> geometries{LaserGeometry::Parallel, LaserGeometry::AntiParallel};
    double radius = 0.53;  // um
    /// Radius factor for pulses flagged reduced_radius; 2^{-1/3} halves the
    /// mean atom number.
    double reduced_radius_factor = 0.7937005259840998;
    std::size_t realizations = 40;
    std::uint64_t seed = 0;
    std::size_t workers = 0;
    std::size_t n_steps = 4000;
    LaserWavelengths wavelengths;
    double ke = kEmissionWavenumber;
    EmissionOptions emission;
    DensityTable density = DensityTable::rubidium87_default();
};

struct RealizationRecord {
    double temperature_c = 0.0;
    LaserGeometry geometry = LaserGeometry::Parallel;
    std::string pulse;
    std::size_t index = 0;
    std::size_t atoms = 0;
    double excited_population = 0.0;
    double p = 0.0;
};

struct SweepRow {
    double temperature_c = 0.0;
    LaserGeometry geometry = LaserGeometry::Parallel;
    std::string pulse;
    double radius = 0.0;
    double mean_atoms = 0.0;  // rho V
    double mean_excited = 0.0;
    double mean_p = 0.0;
    double stderr_p = 0.0;
    std::size_t realizations = 0;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    std::vector<RealizationRecord> records;

    const SweepRow& row(double temperature_c, LaserGeometry geometry, const std::string& pulse) const;
};

/// For every temperature, geometry and pulse: M clouds from atoms_in_sphere,
/// prepare_w, directionality; mean and standard error of p. Both geometries
/// see the same clouds.
SweepTable temperature_sweep(const std::vector<SweepPulse>& pulses,
                             const DirectionalitySweepOptions& options);

}  // namespace rydberg
