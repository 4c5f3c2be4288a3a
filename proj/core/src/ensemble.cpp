#include "rydberg/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace rydberg {

double AtomEnsemble::min_pair_distance() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < positions.size(); ++i)
        for (std::size_t j = i + 1; j < positions.size(); ++j)
            best = std::min(best, (positions[i] - positions[j]).norm());
    return best;
}

Vec3 AtomEnsemble::centroid() const {
    Vec3 c = Vec3::Zero();
    for (const auto& r : positions) c += r;
    return positions.empty() ? c : Vec3(c / static_cast<double>(positions.size()));
}

AtomEnsemble make_chain(std::size_t n, double spacing) {
    if (n == 0) throw DomainError("make_chain: need at least one atom");
    if (!(spacing > 0.0)) throw DomainError("make_chain: spacing must be positive");
    AtomEnsemble e;
    e.geometry = EnsembleGeometry::Chain;
    e.size = spacing * static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) e.positions.emplace_back(spacing * static_cast<double>(i), 0.0, 0.0);
    e.velocities.assign(n, Vec3::Zero());
    return e;
}

AtomEnsemble sample_cloud(std::size_t n, double diameter, std::uint64_t seed,
                          const CloudOptions& options) {
    if (n == 0) throw DomainError("sample_cloud: need at least one atom");
    if (!(diameter > 0.0)) throw DomainError("sample_cloud: diameter must be positive");
    AtomEnsemble e;
    e.geometry = EnsembleGeometry::Sphere;
    e.size = diameter;
    e.seed = seed;
    e.positions.reserve(n);

    const double radius = 0.5 * diameter;
    const double r2max = radius * radius;
    const double d2min = options.min_distance * options.min_distance;
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> uniform(-radius, radius);
    for (std::size_t i = 0; i < n; ++i) {
        bool placed = false;
        for (std::size_t attempt = 0; attempt < options.max_attempts && !placed; ++attempt) {
            Vec3 p;
            do {
                p = Vec3(uniform(rng), uniform(rng), uniform(rng));
            } while (p.squaredNorm() > r2max);
            placed = d2min == 0.0 || std::none_of(e.positions.begin(), e.positions.end(),
                                  [&](const Vec3& q) { return (p - q).squaredNorm() < d2min; });
            if (placed) e.positions.push_back(p);
        }
        if (!placed) {
            std::ostringstream msg;
            msg << "sample_cloud: could not place atom " << i << " of " << n
                << " with minimum distance " << options.min_distance << " um in a ball of diameter "
                << diameter << " um (density too high)";
            throw DomainError(msg.str());
        }
    }
    e.velocities.assign(n, Vec3::Zero());
    return e;
}

AtomEnsemble thermal_velocities(AtomEnsemble ensemble, double sigma_v, std::uint64_t seed) {
    if (!(sigma_v >= 0.0)) throw DomainError("thermal_velocities: sigma_v must be >= 0");
    ensemble.velocities.assign(ensemble.atoms(), Vec3::Zero());
    if (sigma_v == 0.0) return ensemble;
    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, sigma_v);
    for (auto& v : ensemble.velocities) v = Vec3(normal(rng), normal(rng), normal(rng));
    return ensemble;
}

double rb87_velocity_width(double temperature_c) {
    const double t_k = temperature_c + kCelsiusOffset;
    if (!(t_k > 0.0)) throw DomainError("temperature below absolute zero");
    return std::sqrt(kBoltzmann * t_k / kRb87Mass);
}

double rubidium_saturated_density(double temperature_k) {
    // Vapor pressure over liquid rubidium in torr.
    const double log10_p = 15.88253 - 4529.635 / temperature_k + 0.00058663 * temperature_k -
                           2.99138 * std::log10(temperature_k);
    const double pascal = std::pow(10.0, log10_p) * 133.322368;
    return pascal / (kBoltzmann * temperature_k) * 1e-18;
}

DensityTable::DensityTable(std::vector<Anchor> anchors) : anchors_(std::move(anchors)) {
    if (anchors_.empty()) throw DomainError("DensityTable: no anchors");
    std::sort(anchors_.begin(), anchors_.end());
    for (std::size_t i = 0; i < anchors_.size(); ++i) {
        if (!(anchors_[i].second > 0.0)) throw DomainError("DensityTable: densities must be positive");
        if (i > 0 && !(anchors_[i].first > anchors_[i - 1].first))
            throw DomainError("DensityTable: duplicate temperature anchor");
    }
}

DensityTable DensityTable::rubidium87_default() {
    constexpr double kReferenceC = 220.0;
    constexpr double kReferenceDensity = 543.0;
    const double reference = rubidium_saturated_density(kReferenceC + kCelsiusOffset);
    std::vector<Anchor> anchors;
    for (double c = kVaporMinTemperature; c <= kVaporMaxTemperature + 1e-9; c += 20.0) {
        const double rho = c == kReferenceC
                               ? kReferenceDensity
                               : kReferenceDensity *
                                     rubidium_saturated_density(c + kCelsiusOffset) / reference;
        anchors.emplace_back(c, rho);
    }
    return DensityTable(std::move(anchors));
}

double DensityTable::density(double temperature_c) const {
    if (temperature_c < min_temperature() || temperature_c > max_temperature())
        throw DomainError("temperature outside the density table range");
    if (anchors_.size() == 1) return anchors_.front().second;
    auto hi = std::lower_bound(anchors_.begin(), anchors_.end(), temperature_c,
                               [](const Anchor& a, double t) { return a.first < t; });
    if (hi->first == temperature_c) return hi->second;
    auto lo = hi - 1;
    const double x = 1.0 / (temperature_c + kCelsiusOffset);
    const double x0 = 1.0 / (lo->first + kCelsiusOffset);
    const double x1 = 1.0 / (hi->first + kCelsiusOffset);
    const double w = (x - x0) / (x1 - x0);
    return std::exp((1.0 - w) * std::log(lo->second) + w * std::log(hi->second));
}

VaporConditions vapor_conditions(double temperature_c, const DensityTable& table) {
    if (temperature_c < kVaporMinTemperature || temperature_c > kVaporMaxTemperature)
        throw DomainError("vapor_conditions: temperature must lie in 180..280 C");
    VaporConditions v;
    v.temperature_c = temperature_c;
    v.density = table.density(temperature_c);
    v.velocity_width = rb87_velocity_width(temperature_c);
    return v;
}

AtomEnsemble atoms_in_sphere(double temperature_c, double radius, std::uint64_t seed,
                             const DensityTable& table, const SphereOptions& options) {
    const auto vapor = vapor_conditions(temperature_c, table);
    if (!(radius >= 0.0)) throw DomainError("atoms_in_sphere: radius must be >= 0");
    std::size_t n = 0;
    if (options.fixed_atoms) {
        n = *options.fixed_atoms;
    } else {
        const double mean = vapor.density * 4.0 / 3.0 * kPi * radius * radius * radius;
        if (mean > 0.0) {
            Rng rng = make_rng(derive_seed(seed, 0));
            n = static_cast<std::size_t>(std::poisson_distribution<long long>(mean)(rng));
        }
    }
    AtomEnsemble e;
    if (n > 0 && radius > 0.0) {
        e = sample_cloud(n, 2.0 * radius, derive_seed(seed, 1), {options.min_distance, 10'000});
        e = thermal_velocities(std::move(e), vapor.velocity_width, derive_seed(seed, 2));
    }
    e.geometry = EnsembleGeometry::Sphere;
    e.size = 2.0 * radius;
    e.seed = seed;
    return e;
}

void write_ensemble(std::ostream& out, const AtomEnsemble& ensemble) {
    out << "# geometry " << (ensemble.geometry == EnsembleGeometry::Chain ? "chain" : "sphere")
        << " size_um " << std::setprecision(17) << ensemble.size << " seed " << ensemble.seed
        << '\n';
    out << "# x_um y_um z_um vx_mps vy_mps vz_mps\n";
    for (std::size_t i = 0; i < ensemble.atoms(); ++i) {
        const auto& r = ensemble.positions[i];
        const Vec3 v = i < ensemble.velocities.size() ? ensemble.velocities[i] : Vec3::Zero();
        out << r.x() << ' ' << r.y() << ' ' << r.z() << ' ' << v.x() << ' ' << v.y() << ' '
            << v.z() << '\n';
    }
}

AtomEnsemble read_ensemble(std::istream& in) {
    AtomEnsemble e;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        if (line[0] == '#') {
            std::string hash, key;
            row >> hash >> key;
            if (key == "geometry") {
                std::string geometry, size_key, seed_key;
                row >> geometry >> size_key >> e.size >> seed_key >> e.seed;
                e.geometry = geometry == "chain" ? EnsembleGeometry::Chain : EnsembleGeometry::Sphere;
            }
            continue;
        }
        double x, y, z, vx, vy, vz;
        if (!(row >> x >> y >> z >> vx >> vy >> vz))
            throw DomainError("read_ensemble: malformed row '" + line + "'");
        e.positions.emplace_back(x, y, z);
        e.velocities.emplace_back(vx, vy, vz);
    }
    return e;
}

}  // namespace rydberg
