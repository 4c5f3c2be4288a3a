#include "rydberg_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace rydberg::cli {

using nlohmann::json;

namespace {

// Consumes keys of one JSON object and rejects whatever is left over.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
    }

    /// Call once all keys have been read.
    void finish() const {
        for (const auto& item : j_.items()) {
            if (!seen_.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where());
        }
    }

    template <class T>
    void read(const std::string& key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError("wrong type for '" + key + "' in " + where());
        }
    }

    void number(const std::string& key, double& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        if (!j_.at(key).is_number()) throw ConfigError("'" + key + "' in " + where() + " must be a number");
        out = j_.at(key).get<double>();
        if (!std::isfinite(out)) throw ConfigError("'" + key + "' in " + where() + " must be finite");
    }

    void count(const std::string& key, std::size_t& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw ConfigError("'" + key + "' in " + where() + " must be a non-negative integer");
        out = v.get<std::size_t>();
    }

    void counts(const std::string& key, std::vector<std::size_t>& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_array()) throw ConfigError("'" + key + "' in " + where() + " must be an array");
        out.clear();
        for (const auto& e : v) {
            if (!e.is_number_integer() || e.get<long long>() < 0)
                throw ConfigError("'" + key + "' in " + where() + " must hold non-negative integers");
            out.push_back(e.get<std::size_t>());
        }
    }

    void numbers(const std::string& key, std::vector<double>& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_array()) throw ConfigError("'" + key + "' in " + where() + " must be an array");
        out.clear();
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError("'" + key + "' in " + where() + " must hold numbers");
            out.push_back(e.get<double>());
        }
    }

    bool has(const std::string& key) const { return j_.contains(key); }
    void mark(const std::string& key) { seen_.insert(key); }
    const json& child(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }
    std::string path_of(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    std::string where() const { return path_.empty() ? "config" : "'" + path_ + "'"; }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

LaserGeometry geometry_from_string(const std::string& s) {
    if (s == "parallel") return LaserGeometry::Parallel;
    if (s == "anti-parallel") return LaserGeometry::AntiParallel;
    throw ConfigError("geometry must be 'parallel' or 'anti-parallel', got '" + s + "'");
}

std::string geometry_name(LaserGeometry g) {
    return g == LaserGeometry::Parallel ? "parallel" : "anti-parallel";
}

CrabForm form_from_string(const std::string& s) {
    if (s == "multiplicative") return CrabForm::Multiplicative;
    if (s == "additive") return CrabForm::Additive;
    throw ConfigError("optimizer.form must be 'multiplicative' or 'additive'");
}

TimeAverage average_from_string(const std::string& s) {
    if (s == "window") return TimeAverage::Window;
    if (s == "snapshot") return TimeAverage::Snapshot;
    throw ConfigError("directionality.average must be 'window' or 'snapshot'");
}

template <class Fn>
void optional_section(Section& parent, const std::string& key, Fn&& fn) {
    if (!parent.has(key)) {
        parent.mark(key);
        return;
    }
    Section s(parent.child(key), parent.path_of(key));
    fn(s);
    s.finish();
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

}  // namespace

std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::ChainSweep: return "chain-sweep";
        case Experiment::CloudSweep: return "cloud-sweep";
        case Experiment::ModelCheck: return "model-check";
        case Experiment::DirectionalitySweep: return "directionality-sweep";
        case Experiment::Optimize: return "optimize";
    }
    return "unknown";
}

Experiment experiment_from_string(const std::string& name) {
    for (auto e : {Experiment::ChainSweep, Experiment::CloudSweep, Experiment::ModelCheck,
                   Experiment::DirectionalitySweep, Experiment::Optimize}) {
        if (to_string(e) == name) return e;
    }
    throw ConfigError("unknown experiment '" + name + "'");
}

PhysicalModel ModelConfig::build(std::optional<LaserGeometry> geometry_override) const {
    auto m = PhysicalModel::rubidium87(geometry_override.value_or(geometry), wavelengths);
    m.c6 = mhz_to_rad_per_ns(c6_mhz_um6);
    m.delta_gi = mhz_to_rad_per_ns(delta_gi_mhz);
    m.delta_ir = mhz_to_rad_per_ns(delta_ir_mhz);
    m.delta_re = mhz_to_rad_per_ns(delta_re_mhz);
    m.tau1 = tau1_ns;
    m.tau2 = tau2_ns;
    m.validate();
    return m;
}

json template_to_json(const FlatKickTemplate& t) {
    return {{"height_gr_rad_per_ns", t.height_gr}, {"width_gr_ns", t.width_gr},
            {"height_re_rad_per_ns", t.height_re}, {"width_re_ns", t.width_re},
            {"ramp_fraction", t.ramp_fraction}};
}

FlatKickTemplate template_from_json(const json& j) {
    FlatKickTemplate t;
    Section s(j, "template");
    s.number("height_gr_rad_per_ns", t.height_gr);
    s.number("width_gr_ns", t.width_gr);
    s.number("height_re_rad_per_ns", t.height_re);
    s.number("width_re_ns", t.width_re);
    s.number("ramp_fraction", t.ramp_fraction);
    s.finish();
    return t;
}

Config parse_config(const json& j) {
    Config c;
    Section root(j, "");
    std::string experiment = to_string(c.experiment);
    root.read("experiment", experiment);
    c.experiment = experiment_from_string(experiment);
    root.read("seed", c.seed);
    root.count("workers", c.workers);
    root.read("output", c.output);
    root.read("paper", c.paper);

    optional_section(root, "model", [&](Section& s) {
        std::string geometry = geometry_name(c.model.geometry);
        s.read("geometry", geometry);
        c.model.geometry = geometry_from_string(geometry);
        optional_section(s, "wavelengths_um", [&](Section& w) {
            w.number("first", c.model.wavelengths.first);
            w.number("second", c.model.wavelengths.second);
            w.number("third", c.model.wavelengths.third);
        });
        s.number("c6_mhz_um6", c.model.c6_mhz_um6);
        s.number("delta_gi_mhz", c.model.delta_gi_mhz);
        s.number("delta_ir_mhz", c.model.delta_ir_mhz);
        s.number("delta_re_mhz", c.model.delta_re_mhz);
        s.number("tau1_ns", c.model.tau1_ns);
        s.number("tau2_ns", c.model.tau2_ns);
        s.number("emission_wavelength_um", c.model.emission_wavelength_um);
    });
    optional_section(root, "pulse", [&](Section& s) {
        s.number("duration_ns", c.pulse.duration_ns);
        s.count("trotter_steps", c.pulse.trotter_steps);
        s.number("omega_max_mhz", c.pulse.omega_max_mhz);
        optional_section(s, "guess", [&](Section& g) {
            g.number("gr_center", c.pulse.guess.gr_center);
            g.number("re_center", c.pulse.guess.re_center);
            g.number("width", c.pulse.guess.width);
        });
    });
    optional_section(root, "optimizer", [&](Section& s) {
        s.count("basis_size", c.optimizer.basis_size);
        s.count("budget", c.optimizer.budget);
        s.number("initial_step", c.optimizer.initial_step);
        s.number("collapse_tolerance", c.optimizer.collapse_tolerance);
        std::string form = c.optimizer.form == CrabForm::Multiplicative ? "multiplicative" : "additive";
        s.read("form", form);
        c.optimizer.form = form_from_string(form);
        s.read("phase_modulation", c.optimizer.phase_modulation);
        s.count("trotter_steps", c.optimizer.trotter_steps);
    });
    optional_section(root, "chain", [&](Section& s) {
        s.number("spacing_um", c.chain.spacing_um);
        s.counts("atoms", c.chain.atoms);
    });
    optional_section(root, "cloud", [&](Section& s) {
        s.count("atoms", c.cloud.atoms);
        s.numbers("diameters_um", c.cloud.diameters_um);
        s.count("realizations", c.cloud.realizations);
        s.number("min_distance_um", c.cloud.min_distance_um);
        s.number("optimize_diameter_um", c.cloud.optimize_diameter_um);
        s.count("batch", c.cloud.batch);
        s.count("budget", c.cloud.budget);
        s.read("resample", c.cloud.resample);
        s.count("trotter_steps", c.cloud.trotter_steps);
        s.counts("inset_atoms", c.cloud.inset_atoms);
        s.number("inset_diameter_um", c.cloud.inset_diameter_um);
    });
    optional_section(root, "model_check", [&](Section& s) {
        s.count("atoms", c.model_check.atoms);
        s.count("realizations", c.model_check.realizations);
        s.number("diameter_um", c.model_check.diameter_um);
        s.read("pulse", c.model_check.pulse);
        s.count("curve_points", c.model_check.curve_points);
        s.number("rel_tol", c.model_check.rel_tol);
        s.count("trotter_steps", c.model_check.trotter_steps);
    });
    optional_section(root, "directionality", [&](Section& s) {
        auto& d = c.directionality;
        s.numbers("temperatures_c", d.temperatures_c);
        s.number("radius_um", d.radius_um);
        s.number("reduced_radius_factor", d.reduced_radius_factor);
        s.count("realizations", d.realizations);
        s.count("trotter_steps", d.trotter_steps);
        s.number("cone_half_angle", d.cone_half_angle);
        s.number("decay_window_ns", d.decay_window_ns);
        std::string average = d.average == TimeAverage::Window ? "window" : "snapshot";
        s.read("average", average);
        d.average = average_from_string(average);
        s.count("cone_polar", d.cone_polar);
        s.count("cone_azimuthal", d.cone_azimuthal);
        if (s.has("template")) {
            const auto& t = s.child("template");
            if (!t.is_null()) d.template_shape = template_from_json(t);
        } else {
            s.mark("template");
        }
        s.read("template_file", d.template_file);
        s.read("inset", d.inset);
        s.count("inset_polar", d.inset_polar);
        s.count("inset_azimuthal", d.inset_azimuthal);
    });
    optional_section(root, "target", [&](Section& s) {
        s.read("kind", c.target.kind);
        s.count("atoms", c.target.atoms);
        s.number("spacing_um", c.target.spacing_um);
        s.number("diameter_um", c.target.diameter_um);
    });
    root.finish();
    return c;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    auto c = parse_config(j);
    c.base_dir = path.parent_path();
    return c;
}

json to_json(const Config& c) {
    json j;
    j["experiment"] = to_string(c.experiment);
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["output"] = c.output;
    j["paper"] = c.paper;
    j["model"] = {{"geometry", geometry_name(c.model.geometry)},
                  {"wavelengths_um",
                   {{"first", c.model.wavelengths.first},
                    {"second", c.model.wavelengths.second},
                    {"third", c.model.wavelengths.third}}},
                  {"c6_mhz_um6", c.model.c6_mhz_um6},
                  {"delta_gi_mhz", c.model.delta_gi_mhz},
                  {"delta_ir_mhz", c.model.delta_ir_mhz},
                  {"delta_re_mhz", c.model.delta_re_mhz},
                  {"tau1_ns", c.model.tau1_ns},
                  {"tau2_ns", c.model.tau2_ns},
                  {"emission_wavelength_um", c.model.emission_wavelength_um}};
    j["pulse"] = {{"duration_ns", c.pulse.duration_ns},
                  {"trotter_steps", c.pulse.trotter_steps},
                  {"omega_max_mhz", c.pulse.omega_max_mhz},
                  {"guess",
                   {{"gr_center", c.pulse.guess.gr_center},
                    {"re_center", c.pulse.guess.re_center},
                    {"width", c.pulse.guess.width}}}};
    j["optimizer"] = {{"basis_size", c.optimizer.basis_size},
                      {"budget", c.optimizer.budget},
                      {"initial_step", c.optimizer.initial_step},
                      {"collapse_tolerance", c.optimizer.collapse_tolerance},
                      {"form", c.optimizer.form == CrabForm::Multiplicative ? "multiplicative" : "additive"},
                      {"phase_modulation", c.optimizer.phase_modulation},
                      {"trotter_steps", c.optimizer.trotter_steps}};
    j["chain"] = {{"spacing_um", c.chain.spacing_um}, {"atoms", c.chain.atoms}};
    j["cloud"] = {{"atoms", c.cloud.atoms},
                  {"diameters_um", c.cloud.diameters_um},
                  {"realizations", c.cloud.realizations},
                  {"min_distance_um", c.cloud.min_distance_um},
                  {"optimize_diameter_um", c.cloud.optimize_diameter_um},
                  {"batch", c.cloud.batch},
                  {"budget", c.cloud.budget},
                  {"resample", c.cloud.resample},
                  {"trotter_steps", c.cloud.trotter_steps},
                  {"inset_atoms", c.cloud.inset_atoms},
                  {"inset_diameter_um", c.cloud.inset_diameter_um}};
    j["model_check"] = {{"atoms", c.model_check.atoms},
                        {"realizations", c.model_check.realizations},
                        {"diameter_um", c.model_check.diameter_um},
                        {"pulse", c.model_check.pulse},
                        {"curve_points", c.model_check.curve_points},
                        {"rel_tol", c.model_check.rel_tol},
                        {"trotter_steps", c.model_check.trotter_steps}};
    const auto& d = c.directionality;
    j["directionality"] = {{"temperatures_c", d.temperatures_c},
                           {"radius_um", d.radius_um},
                           {"reduced_radius_factor", d.reduced_radius_factor},
                           {"realizations", d.realizations},
                           {"trotter_steps", d.trotter_steps},
                           {"cone_half_angle", d.cone_half_angle},
                           {"decay_window_ns", d.decay_window_ns},
                           {"average", d.average == TimeAverage::Window ? "window" : "snapshot"},
                           {"cone_polar", d.cone_polar},
                           {"cone_azimuthal", d.cone_azimuthal},
                           {"template", d.template_shape ? template_to_json(*d.template_shape) : json()},
                           {"template_file", d.template_file},
                           {"inset", d.inset},
                           {"inset_polar", d.inset_polar},
                           {"inset_azimuthal", d.inset_azimuthal}};
    j["target"] = {{"kind", c.target.kind},
                   {"atoms", c.target.atoms},
                   {"spacing_um", c.target.spacing_um},
                   {"diameter_um", c.target.diameter_um}};
    return j;
}

void apply_paper_scale(Config& c) {
    c.paper = true;
    c.optimizer.budget = 10'000;
    c.cloud.batch = 8;
    c.cloud.budget = 200;
    c.directionality.realizations = 240;
}

void validate(const Config& c) {
    require(c.pulse.duration_ns > 0.0, "pulse.duration_ns must be positive");
    require(c.pulse.trotter_steps >= 1, "pulse.trotter_steps must be >= 1");
    require(c.pulse.omega_max_mhz > 0.0, "pulse.omega_max_mhz must be positive");
    require(c.pulse.guess.width > 0.0, "pulse.guess.width must be positive");
    require(c.optimizer.basis_size >= 1, "optimizer.basis_size must be >= 1");
    require(c.optimizer.budget >= 1, "optimizer.budget must be >= 1");
    require(c.optimizer.initial_step > 0.0, "optimizer.initial_step must be positive");
    require(c.optimizer.trotter_steps >= 1, "optimizer.trotter_steps must be >= 1");
    require(c.model.c6_mhz_um6 > 0.0, "model.c6_mhz_um6 must be positive");
    require(c.model.tau1_ns > 0.0 && c.model.tau2_ns > 0.0, "model lifetimes must be positive");
    require(c.model.emission_wavelength_um > 0.0, "model.emission_wavelength_um must be positive");
    require(c.model.wavelengths.first > 0.0 && c.model.wavelengths.second > 0.0 &&
                c.model.wavelengths.third > 0.0,
            "model.wavelengths_um must be positive");

    switch (c.experiment) {
        case Experiment::ChainSweep:
            require(!c.chain.atoms.empty(), "chain.atoms: empty sweep range");
            require(c.chain.spacing_um > 0.0, "chain.spacing_um must be positive");
            for (auto n : c.chain.atoms)
                require(n >= 1 && n <= kMaxFullAtoms, "chain.atoms must lie in 1..14");
            break;
        case Experiment::CloudSweep:
            require(!c.cloud.diameters_um.empty(), "cloud.diameters_um: empty sweep range");
            require(c.cloud.atoms >= 2 && c.cloud.atoms <= kMaxFullAtoms, "cloud.atoms must lie in 2..14");
            require(c.cloud.realizations >= 2, "cloud.realizations must be >= 2");
            require(c.cloud.batch >= 1 && c.cloud.budget >= 1, "cloud.batch and cloud.budget must be >= 1");
            require(c.cloud.trotter_steps >= 1, "cloud.trotter_steps must be >= 1");
            for (double d : c.cloud.diameters_um) require(d > 0.0, "cloud.diameters_um must be positive");
            for (auto n : c.cloud.inset_atoms)
                require(n >= 2 && n <= kMaxFullAtoms, "cloud.inset_atoms must lie in 2..14");
            require(c.cloud.optimize_diameter_um > 0.0 && c.cloud.inset_diameter_um > 0.0,
                    "cloud diameters must be positive");
            break;
        case Experiment::ModelCheck:
            require(c.model_check.atoms >= 2 && c.model_check.atoms <= 12, "model_check.atoms must lie in 2..12");
            require(c.model_check.realizations >= 1, "model_check.realizations must be >= 1");
            require(c.model_check.diameter_um > 0.0, "model_check.diameter_um must be positive");
            require(c.model_check.curve_points >= 2, "model_check.curve_points must be >= 2");
            require(c.model_check.rel_tol > 0.0, "model_check.rel_tol must be positive");
            require(c.model_check.pulse == "gaussian" || c.model_check.pulse == "flat-kick",
                    "model_check.pulse must be 'gaussian' or 'flat-kick'");
            break;
        case Experiment::DirectionalitySweep: {
            const auto& d = c.directionality;
            require(!d.temperatures_c.empty(), "directionality.temperatures_c: empty sweep range");
            for (double t : d.temperatures_c)
                require(t >= kVaporMinTemperature && t <= kVaporMaxTemperature,
                        "directionality.temperatures_c must lie in 180..280 C");
            require(d.radius_um > 0.0 && d.reduced_radius_factor > 0.0, "directionality radii must be positive");
            require(d.realizations >= 2, "directionality.realizations must be >= 2");
            require(d.cone_half_angle > 0.0 && d.cone_half_angle < kPi,
                    "directionality.cone_half_angle must lie in (0, pi)");
            require(d.decay_window_ns > 0.0, "directionality.decay_window_ns must be positive");
            require(d.cone_polar >= 1 && d.cone_azimuthal >= 1 && d.inset_polar >= 1 && d.inset_azimuthal >= 1,
                    "directionality grid sizes must be >= 1");
            require(!(d.template_shape && !d.template_file.empty()),
                    "directionality: give either template or template_file, not both");
            if (d.template_shape)
                require(d.template_shape->feasible(c.pulse.duration_ns), "directionality.template is infeasible");
            break;
        }
        case Experiment::Optimize:
            require(c.target.kind == "chain" || c.target.kind == "cloud", "target.kind must be 'chain' or 'cloud'");
            require(c.target.atoms >= 1 && c.target.atoms <= kMaxFullAtoms, "target.atoms must lie in 1..14");
            require(c.target.spacing_um > 0.0 && c.target.diameter_um > 0.0, "target sizes must be positive");
            break;
    }
}

}  // namespace rydberg::cli
