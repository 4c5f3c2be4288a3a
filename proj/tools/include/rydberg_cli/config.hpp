#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <rydberg/control.hpp>
#include <rydberg/emission.hpp>
#include <rydberg/model.hpp>

namespace rydberg::cli {

/// Malformed or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Experiment { ChainSweep, CloudSweep, ModelCheck, DirectionalitySweep, Optimize };

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& name);

struct ModelConfig {
    LaserGeometry geometry = LaserGeometry::Parallel;
    LaserWavelengths wavelengths;
    double c6_mhz_um6 = 5880.0;
    double delta_gi_mhz = 2000.0;
    double delta_ir_mhz = 0.0;
    double delta_re_mhz = 0.0;
    double tau1_ns = 26.2;
    double tau2_ns = 27.7;
    double emission_wavelength_um = 0.795;

    /// Rubidium-87 model with the overrides applied (frequencies in rad/ns).
    PhysicalModel build(std::optional<LaserGeometry> geometry_override = std::nullopt) const;
};

struct PulseConfig {
    double duration_ns = 2.5;
    std::size_t trotter_steps = kDefaultTrotterSteps;
    double omega_max_mhz = 2000.0;  // 2 pi x 2 rad/ns
    GuessShape guess;
};

struct OptimizerConfig {
    std::size_t basis_size = 14;
    std::size_t budget = 2000;
    double initial_step = 0.1;
    double collapse_tolerance = 1e-8;
    CrabForm form = CrabForm::Multiplicative;
    bool phase_modulation = false;
    /// Trotter steps used inside the objective; results are re-evaluated
    /// with pulse.trotter_steps.
    std::size_t trotter_steps = 2500;
};

struct ChainConfig {
    double spacing_um = 0.35;
    std::vector<std::size_t> atoms{1, 2, 3, 4, 5, 6};
};

struct CloudConfig {
    std::size_t atoms = 10;
    std::vector<double> diameters_um{0.8, 1.0, 1.2, 1.4, 1.6};
    std::size_t realizations = 8;
    double min_distance_um = 0.05;
    /// Reduced (template) optimisation on a fixed batch.
    double optimize_diameter_um = 1.2;
    std::size_t batch = 4;
    std::size_t budget = 40;
    bool resample = false;
    std::size_t trotter_steps = 2500;
    /// Inset: mean infidelity versus N at fixed diameter.
    std::vector<std::size_t> inset_atoms{7, 8, 9, 10, 11};
    double inset_diameter_um = 1.2;
};

struct ModelCheckConfig {
    std::size_t atoms = 10;
    std::size_t realizations = 8;
    double diameter_um = 2.0;
    std::string pulse = "gaussian";  // gaussian | flat-kick
    std::size_t curve_points = 41;
    double rel_tol = 1e-4;
    std::size_t trotter_steps = 4000;
};

struct DirectionalityConfig {
    std::vector<double> temperatures_c{200, 210, 220, 230, 240, 250, 260};
    double radius_um = 0.53;
    double reduced_radius_factor = 0.7937005259840998;
    std::size_t realizations = 40;
    std::size_t trotter_steps = 4000;
    double cone_half_angle = 0.3;
    double decay_window_ns = 100.0;
    TimeAverage average = TimeAverage::Window;
    std::size_t cone_polar = 16;
    std::size_t cone_azimuthal = 64;
    /// Optimised template; absent means the pi-area start template.
    std::optional<FlatKickTemplate> template_shape;
    /// Path to a template.json written by cloud-sweep (relative paths are
    /// resolved against the config file).
    std::string template_file;
    bool inset = true;
    std::size_t inset_polar = 200;
    std::size_t inset_azimuthal = 100;
};

struct TargetConfig {
    std::string kind = "chain";  // chain | cloud
    std::size_t atoms = 4;
    double spacing_um = 0.35;
    double diameter_um = 1.0;
};

struct Config {
    Experiment experiment = Experiment::ChainSweep;
    std::uint64_t seed = 1;
    std::size_t workers = 0;
    std::string output = "out";
    bool paper = false;
    ModelConfig model;
    PulseConfig pulse;
    OptimizerConfig optimizer;
    ChainConfig chain;
    CloudConfig cloud;
    ModelCheckConfig model_check;
    DirectionalityConfig directionality;
    TargetConfig target;
    std::filesystem::path base_dir;  // directory of the config file, not serialised
};

/// Strict parse: unknown keys, wrong types and invalid values throw ConfigError.
Config parse_config(const nlohmann::json& j);
Config load_config(const std::filesystem::path& path);
/// Every field, defaults included; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const Config& config);

/// Scales realization counts and budgets up to the paper's values.
void apply_paper_scale(Config& config);
void validate(const Config& config);

nlohmann::json template_to_json(const FlatKickTemplate& t);
FlatKickTemplate template_from_json(const nlohmann::json& j);

}  // namespace rydberg::cli
