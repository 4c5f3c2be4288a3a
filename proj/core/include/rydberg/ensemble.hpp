#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rydberg/model.hpp"
#include "rydberg/random.hpp"

namespace rydberg {

enum class EnsembleGeometry { Chain, Sphere };

/// Atom positions in um and velocities in m/s.
struct AtomEnsemble {
    std::vector<Vec3> positions;
    std::vector<Vec3> velocities;
    EnsembleGeometry geometry = EnsembleGeometry::Chain;
    double size = 0.0;  // chain: a0 (N - 1); sphere: diameter L0
    std::uint64_t seed = 0;

    std::size_t atoms() const { return positions.size(); }
    double min_pair_distance() const;
    Vec3 centroid() const;
};

AtomEnsemble make_chain(std::size_t n, double spacing);

struct CloudOptions {
    double min_distance = 0.05;          // um
    std::size_t max_attempts = 10'000;   // per atom
};

/// Uniform positions in the ball of diameter `diameter`, drawn by rejection
/// from the bounding cube; atoms closer than `min_distance` to an already
/// placed atom are redrawn.
AtomEnsemble sample_cloud(std::size_t n, double diameter, std::uint64_t seed,
                          const CloudOptions& options = {});

/// Each velocity component i.i.d. normal(0, sigma_v^2), sigma_v in m/s.
AtomEnsemble thermal_velocities(AtomEnsemble ensemble, double sigma_v, std::uint64_t seed);

/// Thermal root-mean-square velocity per component of 87Rb.
double rb87_velocity_width(double temperature_c);

struct VaporConditions {
    double temperature_c = 0.0;
    double density = 0.0;          // 87Rb atoms / um^3
    double velocity_width = 0.0;   // m/s
    double isotope_fraction = 0.2783;
};

/// Density anchors (temperature in C, 87Rb density in atoms/um^3),
/// interpolated log-linearly in 1 / T_K.
class DensityTable {
public:
    using Anchor = std::pair<double, double>;

    explicit DensityTable(std::vector<Anchor> anchors);

    /// Anchors every 20 C over 180..280 C from the liquid-phase Rb vapor
    /// pressure correlation times the 87Rb fraction, scaled so that
    /// 220 C maps to 543 atoms/um^3.
    static DensityTable rubidium87_default();

    double density(double temperature_c) const;
    double min_temperature() const { return anchors_.front().first; }
    double max_temperature() const { return anchors_.back().first; }
    const std::vector<Anchor>& anchors() const { return anchors_; }

private:
    std::vector<Anchor> anchors_;
};

/// Total Rb number density (atoms/um^3) of saturated vapor over liquid Rb.
double rubidium_saturated_density(double temperature_k);

inline constexpr double kVaporMinTemperature = 180.0;
inline constexpr double kVaporMaxTemperature = 280.0;

VaporConditions vapor_conditions(double temperature_c,
                                 const DensityTable& table = DensityTable::rubidium87_default());

struct SphereOptions {
    std::optional<std::size_t> fixed_atoms;  // bypasses the Poisson draw
    double min_distance = 0.0;               // um, see CloudOptions
};

/// Poisson-distributed atom number with mean rho (4/3) pi R^3, uniform
/// positions in the sphere and thermal velocities.
AtomEnsemble atoms_in_sphere(double temperature_c, double radius, std::uint64_t seed,
                             const DensityTable& table = DensityTable::rubidium87_default(),
                             const SphereOptions& options = {});

/// Plain-text table, one row per atom: x y z vx vy vz.
void write_ensemble(std::ostream& out, const AtomEnsemble& ensemble);
AtomEnsemble read_ensemble(std::istream& in);

}  // namespace rydberg
