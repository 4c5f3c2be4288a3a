#include "rydberg/emission.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "emission_kernels.hpp"
#include "rydberg/parallel.hpp"
#include "rydberg/random.hpp"

namespace rydberg {

namespace {

struct Legendre {
    std::vector<double> x;  // on [-1, 1]
    std::vector<double> w;
};

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix.
Legendre gauss_legendre(std::size_t n) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                   static_cast<Eigen::Index>(n));
    for (std::size_t k = 1; k < n; ++k) {
        const double b = static_cast<double>(k) / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k, k - 1) = jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    Legendre out;
    for (std::size_t k = 0; k < n; ++k) {
        out.x.push_back(solver.eigenvalues()(k));
        const double v = solver.eigenvectors()(0, k);
        out.w.push_back(2.0 * v * v);
    }
    return out;
}

// Orthonormal (e1, e2) completing `axis` to a right-handed frame.
std::pair<Vec3, Vec3> transverse_frame(const Vec3& axis) {
    const Vec3 helper = std::abs(axis.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 e1 = axis.cross(helper).normalized();
    return {e1, axis.cross(e1)};
}

AngularGrid product_grid(const std::vector<double>& cos_nodes, const std::vector<double>& cos_weights,
                         std::size_t n_azimuthal, const Vec3& axis) {
    if (n_azimuthal == 0) throw DomainError("angular grid: need azimuthal nodes");
    const Vec3 a = axis.normalized();
    const auto [e1, e2] = transverse_frame(a);
    const double dphi = kTwoPi / static_cast<double>(n_azimuthal);
    AngularGrid grid;
    grid.directions.reserve(cos_nodes.size() * n_azimuthal);
    for (std::size_t k = 0; k < cos_nodes.size(); ++k) {
        const double c = cos_nodes[k];
        const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        for (std::size_t m = 0; m < n_azimuthal; ++m) {
            const double phi = dphi * static_cast<double>(m);
            grid.directions.push_back(c * a + s * (std::cos(phi) * e1 + std::sin(phi) * e2));
            grid.weights.push_back(cos_weights[k] * dphi);
        }
    }
    return grid;
}

// Emitters and positions laid out for the direction loop.
struct EmitterArrays {
    std::vector<double> cre, cim, x0, y0, z0, vx, vy, vz;
    std::vector<double> x, y, z;
    mutable std::vector<double> scratch;

    explicit EmitterArrays(const ApproxWState& state) {
        const auto c = state.emitters();
        for (std::size_t i = 0; i < c.size(); ++i) {
            cre.push_back(c[i].real());
            cim.push_back(c[i].imag());
            x0.push_back(state.positions[i].x());
            y0.push_back(state.positions[i].y());
            z0.push_back(state.positions[i].z());
            const Vec3 v = mps_to_um_per_ns(1.0) * state.velocities[i];
            vx.push_back(v.x());
            vy.push_back(v.y());
            vz.push_back(v.z());
        }
        x = x0;
        y = y0;
        z = z0;
    }

    void move_to(double t) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = x0[i] + vx[i] * t;
            y[i] = y0[i] + vy[i] * t;
            z[i] = z0[i] + vz[i] * t;
        }
    }

    double intensity(const Vec3& n, double ke) const {
        scratch.resize(3 * x.size());
        return detail::field_intensity(x.data(), y.data(), z.data(), cre.data(), cim.data(),
                                       x.size(), -ke * n.x(), -ke * n.y(), -ke * n.z(),
                                       scratch.data());
    }

    double sphere_total(double ke) const {
        double diag = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) diag += cre[i] * cre[i] + cim[i] * cim[i];
        const double off = detail::pair_sinc_sum(x.data(), y.data(), z.data(), cre.data(),
                                                 cim.data(), x.size(), ke);
        return 4.0 * kPi * (diag + 2.0 * off);
    }

    double grid_integral(const AngularGrid& grid, double ke) const {
        double sum = 0.0;
        for (std::size_t d = 0; d < grid.directions.size(); ++d) {
            sum += grid.weights[d] * intensity(grid.directions[d], ke);
        }
        return sum;
    }
};

void validate(const EmissionOptions& options) {
    if (!(options.cone_half_angle > 0.0 && options.cone_half_angle < kPi))
        throw DomainError("emission: cone half-angle must lie in (0, pi)");
    if (!(options.decay_window > 0.0)) throw DomainError("emission: decay window must be positive");
    if (!(options.tau > 0.0)) throw DomainError("emission: tau must be positive");
    if (options.cone_polar == 0 || options.cone_azimuthal == 0 || options.grid_polar == 0 ||
        options.grid_azimuthal == 0 || options.time_nodes_per_panel == 0)
        throw DomainError("emission: quadrature sizes must be positive");
}

void validate(const ApproxWState& state) {
    if (state.atoms() == 0) throw DomainError("emission: state has no atoms");
    if (state.positions.size() != state.atoms() || state.velocities.size() != state.atoms())
        throw DomainError("emission: amplitudes, positions and velocities differ in length");
}

}  // namespace

double ApproxWState::excited_population() const {
    double sum = 0.0;
    for (const auto& a : amplitudes) sum += std::norm(a);
    return sum;
}

std::vector<Complex> ApproxWState::emitters() const {
    std::vector<Complex> c(amplitudes.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        c[i] = amplitudes[i] * std::polar(1.0, k0.dot(positions[i]));
    }
    return c;
}

ApproxWState prepare_w(const AtomEnsemble& ensemble, const PhysicalModel& model,
                       const ControlPulse& pulse, std::size_t n_steps, double ke) {
    if (ensemble.velocities.size() != ensemble.atoms())
        throw DomainError("prepare_w: ensemble needs velocities");
    const RestrictedOptions options{n_steps, true, true};
    const auto evolved = evolve_restricted(ensemble, model, pulse, options);
    ApproxWState state;
    state.positions = ensemble.positions;
    state.velocities = ensemble.velocities;
    state.k0 = model.imprint_wavevector();
    state.ke = ke;
    state.ground = evolved.ground();
    for (std::size_t i = 0; i < ensemble.atoms(); ++i) {
        state.amplitudes.push_back(evolved.excited(i) *
                                   std::polar(1.0, -state.k0.dot(ensemble.positions[i])));
        state.rydberg_population += std::norm(evolved.rydberg(i));
    }
    return state;
}

double angular_intensity(const ApproxWState& state, const Vec3& direction, double t) {
    validate(state);
    if (std::abs(direction.norm() - 1.0) > 1e-9) throw DomainError("angular_intensity: |n| != 1");
    EmitterArrays arrays(state);
    arrays.move_to(t);
    return arrays.intensity(direction, state.ke);
}

double total_intensity(const ApproxWState& state, double t) {
    validate(state);
    EmitterArrays arrays(state);
    arrays.move_to(t);
    return arrays.sphere_total(state.ke);
}

TimeNodes emission_time_nodes(const EmissionOptions& options) {
    validate(options);
    TimeNodes nodes;
    if (options.average == TimeAverage::Snapshot) {
        nodes.t.push_back(options.decay_window);
        nodes.w.push_back(1.0);
        return nodes;
    }
    // Panels 0, 1/2, 1, 2, 4, ... resolve the fast early dephasing.
    std::vector<double> edges{0.0};
    for (double e = 0.5; e < options.decay_window; e *= 2.0) edges.push_back(e);
    edges.push_back(options.decay_window);
    const auto gl = gauss_legendre(options.time_nodes_per_panel);
    double sum = 0.0;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double mid = 0.5 * (edges[p] + edges[p + 1]);
        const double half = 0.5 * (edges[p + 1] - edges[p]);
        for (std::size_t k = 0; k < gl.x.size(); ++k) {
            const double t = mid + half * gl.x[k];
            const double w = half * gl.w[k] * std::exp(-t / options.tau);
            nodes.t.push_back(t);
            nodes.w.push_back(w);
            sum += w;
        }
    }
    for (auto& w : nodes.w) w /= sum;
    return nodes;
}

AngularGrid sphere_grid(std::size_t n_polar, std::size_t n_azimuthal, const Vec3& axis) {
    if (n_polar == 0) throw DomainError("sphere_grid: need polar nodes");
    std::vector<double> c, w;
    const double dc = 2.0 / static_cast<double>(n_polar);
    for (std::size_t k = 0; k < n_polar; ++k) {
        c.push_back(1.0 - dc * (static_cast<double>(k) + 0.5));
        w.push_back(dc);
    }
    return product_grid(c, w, n_azimuthal, axis);
}

AngularGrid cone_grid(double half_angle, std::size_t n_polar, std::size_t n_azimuthal,
                      const Vec3& axis) {
    if (!(half_angle > 0.0 && half_angle < kPi)) throw DomainError("cone_grid: bad half-angle");
    if (n_polar == 0) throw DomainError("cone_grid: need polar nodes");
    const double lo = std::cos(half_angle);
    const auto gl = gauss_legendre(n_polar);
    std::vector<double> c, w;
    for (std::size_t k = 0; k < n_polar; ++k) {
        c.push_back(0.5 * (1.0 + lo) + 0.5 * (1.0 - lo) * gl.x[k]);
        w.push_back(0.5 * (1.0 - lo) * gl.w[k]);
    }
    return product_grid(c, w, n_azimuthal, axis);
}

Vec3 forward_axis(const ApproxWState& state) {
    const double norm = state.k0.norm();
    return norm > 0.0 ? Vec3(state.k0 / norm) : Vec3::UnitZ();
}

Directionality directionality(const ApproxWState& state, const EmissionOptions& options) {
    validate(state);
    validate(options);
    const Vec3 axis = forward_axis(state);
    const auto cone = cone_grid(options.cone_half_angle, options.cone_polar,
                                options.cone_azimuthal, axis);
    AngularGrid sphere;
    if (options.total == SphereTotal::Grid)
        sphere = sphere_grid(options.grid_polar, options.grid_azimuthal, axis);
    const auto times = emission_time_nodes(options);

    EmitterArrays arrays(state);
    Directionality out;
    for (std::size_t k = 0; k < times.t.size(); ++k) {
        arrays.move_to(times.t[k]);
        out.cone += times.w[k] * arrays.grid_integral(cone, state.ke);
        out.total += times.w[k] * (options.total == SphereTotal::Analytic
                                       ? arrays.sphere_total(state.ke)
                                       : arrays.grid_integral(sphere, state.ke));
    }
    if (!(out.total > 0.0)) throw NumericalError("directionality: no emitted intensity");
    out.p = std::clamp(out.cone / out.total, 0.0, 1.0);
    return out;
}

EmissionResult angular_distribution(const ApproxWState& state, const EmissionOptions& options) {
    validate(state);
    validate(options);
    EmissionResult result;
    result.grid = sphere_grid(options.grid_polar, options.grid_azimuthal, forward_axis(state));
    result.intensity.assign(result.grid.directions.size(), 0.0);
    const auto times = emission_time_nodes(options);
    EmitterArrays arrays(state);
    for (std::size_t k = 0; k < times.t.size(); ++k) {
        arrays.move_to(times.t[k]);
        for (std::size_t d = 0; d < result.grid.directions.size(); ++d) {
            result.intensity[d] += times.w[k] * arrays.intensity(result.grid.directions[d], state.ke);
        }
    }
    double integral = 0.0;
    for (std::size_t d = 0; d < result.intensity.size(); ++d)
        integral += result.grid.weights[d] * result.intensity[d];
    if (!(integral > 0.0)) throw NumericalError("angular_distribution: no emitted intensity");
    for (auto& v : result.intensity) v /= integral;
    result.p = directionality(state, options).p;
    result.atoms = state.atoms();
    result.excited_population = state.excited_population();
    return result;
}

const SweepRow& SweepTable::row(double temperature_c, LaserGeometry geometry,
                                const std::string& pulse) const {
    for (const auto& r : rows) {
        if (std::abs(r.temperature_c - temperature_c) < 1e-9 && r.geometry == geometry &&
            r.pulse == pulse)
            return r;
    }
    throw std::out_of_range("SweepTable: no row for " + pulse);
}

SweepTable temperature_sweep(const std::vector<SweepPulse>& pulses,
                             const DirectionalitySweepOptions& options) {
    if (options.realizations < 2) throw DomainError("temperature_sweep: need M >= 2");
    if (options.temperatures_c.empty() || pulses.empty() || options.geometries.empty())
        throw DomainError("temperature_sweep: empty sweep");
    if (!(options.radius > 0.0) || !(options.reduced_radius_factor > 0.0))
        throw DomainError("temperature_sweep: radii must be positive");
    validate(options.emission);

    const std::size_t n_temp = options.temperatures_c.size();
    const std::size_t n_pulse = pulses.size();
    const std::size_t n_geom = options.geometries.size();
    const std::size_t m = options.realizations;

    std::vector<PhysicalModel> models;
    for (auto g : options.geometries) models.push_back(PhysicalModel::rubidium87(g, options.wavelengths));

    struct Setting {
        double radius;
        double mean_atoms;
        ControlPulse pulse;
    };
    std::vector<Setting> settings;  // [temperature][pulse]
    for (double temp : options.temperatures_c) {
        const auto vapor = vapor_conditions(temp, options.density);
        for (const auto& sp : pulses) {
            const double r = sp.reduced_radius ? options.radius * options.reduced_radius_factor
                                               : options.radius;
            const double mean = vapor.density * 4.0 / 3.0 * kPi * r * r * r;
            settings.push_back({r, mean, sp.make(mean)});
        }
    }

    std::vector<RealizationRecord> records(n_temp * n_pulse * m * n_geom);
    parallel_for(n_temp * n_pulse * m, options.workers, [&](std::size_t task) {
        const std::size_t ti = task / (n_pulse * m);
        const std::size_t pi = (task / m) % n_pulse;
        const std::size_t mi = task % m;
        const auto& setting = settings[ti * n_pulse + pi];
        // Pulses sharing a radius see the same clouds, and so do the geometries.
        const std::uint64_t stream = pulses[pi].reduced_radius ? 1 : 0;
        const std::uint64_t seed =
            derive_seed(derive_seed(derive_seed(options.seed, ti), stream), mi);
        const auto ensemble = atoms_in_sphere(options.temperatures_c[ti], setting.radius, seed,
                                              options.density);
        for (std::size_t gi = 0; gi < n_geom; ++gi) {
            auto& rec = records[task * n_geom + gi];
            rec.temperature_c = options.temperatures_c[ti];
            rec.geometry = options.geometries[gi];
            rec.pulse = pulses[pi].tag;
            rec.index = mi;
            rec.atoms = ensemble.atoms();
            if (ensemble.atoms() == 0) continue;
            const auto state =
                prepare_w(ensemble, models[gi], setting.pulse, options.n_steps, options.ke);
            rec.excited_population = state.excited_population();
            rec.p = directionality(state, options.emission).p;
        }
    });

    SweepTable table;
    for (std::size_t ti = 0; ti < n_temp; ++ti) {
        for (std::size_t gi = 0; gi < n_geom; ++gi) {
            for (std::size_t pi = 0; pi < n_pulse; ++pi) {
                SweepRow row;
                row.temperature_c = options.temperatures_c[ti];
                row.geometry = options.geometries[gi];
                row.pulse = pulses[pi].tag;
                row.radius = settings[ti * n_pulse + pi].radius;
                row.mean_atoms = settings[ti * n_pulse + pi].mean_atoms;
                row.realizations = m;
                double sum = 0.0, sum_exc = 0.0;
                for (std::size_t mi = 0; mi < m; ++mi) {
                    const auto& rec = records[((ti * n_pulse + pi) * m + mi) * n_geom + gi];
                    sum += rec.p;
                    sum_exc += rec.excited_population;
                }
                row.mean_p = sum / static_cast<double>(m);
                row.mean_excited = sum_exc / static_cast<double>(m);
                double var = 0.0;
                for (std::size_t mi = 0; mi < m; ++mi) {
                    const auto& rec = records[((ti * n_pulse + pi) * m + mi) * n_geom + gi];
                    var += (rec.p - row.mean_p) * (rec.p - row.mean_p);
                }
                row.stderr_p = std::sqrt(var / static_cast<double>(m - 1) / static_cast<double>(m));
                table.rows.push_back(row);
            }
        }
    }
    table.records = std::move(records);
    return table;
}

}  // namespace rydberg
