#include "rydberg_cli/runners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <rydberg/analytics.hpp>
#include <rydberg/parallel.hpp>
#include <rydberg/random.hpp>

#include "rydberg_cli/io.hpp"

namespace rydberg::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string num(double v) { return format_number(v); }
std::string num(std::size_t v) { return std::to_string(v); }

std::string geometry_tag(LaserGeometry g) { return g == LaserGeometry::Parallel ? "parallel" : "anti-parallel"; }

struct Stats {
    double mean = 0.0;
    double stderr_ = 0.0;
};

Stats stats(const std::vector<double>& v) {
    Stats s;
    if (v.empty()) return s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() > 1) {
        double var = 0.0;
        for (double x : v) var += (x - s.mean) * (x - s.mean);
        s.stderr_ = std::sqrt(var / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
    return s;
}

double omega_max(const Config& c) { return mhz_to_rad_per_ns(c.pulse.omega_max_mhz); }

ControlPulse guess_pulse(const Config& c, std::size_t atoms, std::size_t steps) {
    return gaussian_pi_guess(c.pulse.duration_ns, atoms, steps + 1, c.pulse.guess, omega_max(c));
}

OptimizerOptions optimizer_options(const Config& c, std::uint64_t seed) {
    OptimizerOptions o;
    o.basis_size = c.optimizer.basis_size;
    o.budget = c.optimizer.budget;
    o.initial_step = c.optimizer.initial_step;
    o.collapse_tolerance = c.optimizer.collapse_tolerance;
    o.form = c.optimizer.form;
    o.phase_modulation = c.optimizer.phase_modulation;
    o.omega_max = omega_max(c);
    o.seed = seed;
    return o;
}

struct CrabOutcome {
    OptimizationReport report;
    OptimizerOptions options;
    ControlPulse best;
    double eps_guess = 1.0;
    double eps_best = 1.0;
    bool crab_selected = true;
};

// CRAB at the optimiser's step count, then both candidates re-evaluated at
// the reporting step count; the better one is kept.
CrabOutcome crab_on(const Config& c, const AtomEnsemble& ensemble, std::uint64_t seed) {
    const auto model = c.model.build();
    StatePreparationProblem problem{model, ensemble};
    problem.n_steps = c.optimizer.trotter_steps;
    const auto guess = guess_pulse(c, ensemble.atoms(), c.pulse.trotter_steps);
    CrabOutcome out;
    out.options = optimizer_options(c, seed);
    out.report = optimize([&](const ControlPulse& p) { return full_infidelity(problem, p); }, guess,
                          out.options);
    out.best = best_pulse(out.report, guess, out.options);
    problem.n_steps = c.pulse.trotter_steps;
    out.eps_guess = full_infidelity(problem, guess);
    out.eps_best = full_infidelity(problem, out.best);
    if (out.eps_best > out.eps_guess) {
        out.crab_selected = false;
        out.eps_best = out.eps_guess;
        out.best = guess;
    }
    return out;
}

AtomEnsemble cloud(const Config& c, std::size_t atoms, double diameter, std::uint64_t seed) {
    CloudOptions options;
    options.min_distance = c.cloud.min_distance_um;
    return sample_cloud(atoms, diameter, seed, options);
}

}  // namespace

void write_pulse(const fs::path& path, const ControlPulse& pulse) {
    CsvTable t({"t_ns", "gr_re", "gr_im", "re_re", "re_im"});
    for (std::size_t k = 0; k < pulse.points(); ++k) {
        t.add({num(pulse.time(k)), num(pulse.gr()[k].real()), num(pulse.gr()[k].imag()),
               num(pulse.re()[k].real()), num(pulse.re()[k].imag())});
    }
    t.write(path);
}

json run_chain_sweep(const Config& c, const fs::path& out) {
    const auto& sizes = c.chain.atoms;
    std::vector<CrabOutcome> results(sizes.size());
    parallel_for(sizes.size(), c.workers, [&](std::size_t i) {
        results[i] = crab_on(c, make_chain(sizes[i], c.chain.spacing_um), derive_seed(c.seed, sizes[i]));
    });

    CsvTable table({"atoms", "length_um", "eps_gauss", "eps_opt", "evaluations", "restarts", "selected"});
    json rows = json::array();
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const auto& r = results[i];
        const double length = c.chain.spacing_um * static_cast<double>(sizes[i] - 1);
        table.add({num(sizes[i]), num(length), num(r.eps_guess), num(r.eps_best), num(r.report.evaluations),
                   num(r.report.restarts), r.crab_selected ? "crab" : "guess"});
        const std::string stem = "chain_N" + std::to_string(sizes[i]);
        write_json(out / (stem + "_checkpoint.json"), checkpoint_to_json(r.report, r.options));
        write_pulse(out / (stem + "_pulse.csv"), r.best);
        rows.push_back({{"atoms", sizes[i]}, {"eps_gauss", r.eps_guess}, {"eps_opt", r.eps_best}});
    }
    table.write(out / "chain_sweep.csv");
    return {{"points", rows}};
}

json run_optimize(const Config& c, const fs::path& out) {
    const auto ensemble = c.target.kind == "chain"
                              ? make_chain(c.target.atoms, c.target.spacing_um)
                              : cloud(c, c.target.atoms, c.target.diameter_um, derive_seed(c.seed, 1));
    const auto r = crab_on(c, ensemble, derive_seed(c.seed, 2));
    write_json(out / "checkpoint.json", checkpoint_to_json(r.report, r.options));
    write_pulse(out / "pulse.csv", r.best);
    CsvTable trace({"evaluation", "infidelity"});
    for (std::size_t k = 0; k < r.report.trace.size(); ++k) trace.add({num(k), num(r.report.trace[k])});
    trace.write(out / "trace.csv");
    return {{"target", c.target.kind},
            {"atoms", c.target.atoms},
            {"eps_gauss", r.eps_guess},
            {"eps_opt", r.eps_best},
            {"objective_best", r.report.best_infidelity},
            {"evaluations", r.report.evaluations},
            {"restarts", r.report.restarts},
            {"selected", r.crab_selected ? "crab" : "guess"}};
}

json run_cloud_sweep(const Config& c, const fs::path& out) {
    const auto model = c.model.build();
    const double duration = c.pulse.duration_ns;
    const std::size_t steps = c.cloud.trotter_steps;
    auto objective = [&](const ControlPulse& pulse, const AtomEnsemble& ensemble) {
        StatePreparationProblem problem{model, ensemble};
        problem.n_steps = steps;
        return full_infidelity(problem, pulse);
    };

    // 1. Reduced optimisation of the flat-kick template on a training batch.
    std::vector<AtomEnsemble> batch;
    for (std::size_t b = 0; b < c.cloud.batch; ++b)
        batch.push_back(cloud(c, c.cloud.atoms, c.cloud.optimize_diameter_um, derive_seed(derive_seed(c.seed, 0), b)));
    ReducedOptions ro;
    ro.budget = c.cloud.budget;
    ro.initial_step = c.optimizer.initial_step;
    ro.collapse_tolerance = c.optimizer.collapse_tolerance;
    ro.duration = duration;
    ro.n_points = steps + 1;
    ro.omega_max = omega_max(c);
    ro.workers = c.workers;
    if (c.cloud.resample) {
        ro.resample = [&](std::size_t evaluation) {
            std::vector<AtomEnsemble> fresh;
            const auto stream = derive_seed(derive_seed(c.seed, 3), evaluation);
            for (std::size_t b = 0; b < c.cloud.batch; ++b)
                fresh.push_back(cloud(c, c.cloud.atoms, c.cloud.optimize_diameter_um, derive_seed(stream, b)));
            return fresh;
        };
    }
    const auto report = reduced_optimize(batch, FlatKickTemplate::pi_areas(duration), objective, ro);
    write_json(out / "template.json",
               {{"template", template_to_json(report.best)},
                {"initial_mean_infidelity", report.initial_mean_infidelity},
                {"best_mean_infidelity", report.best_mean_infidelity},
                {"evaluations", report.evaluations},
                {"atoms", c.cloud.atoms},
                {"diameter_um", c.cloud.optimize_diameter_um},
                {"trace", report.trace}});

    // 2. Held-out clouds: guess and template infidelities.
    struct Cell {
        double eps_gauss = 0.0;
        double eps_opt = 0.0;
    };
    auto evaluate = [&](std::size_t atoms, double diameter, std::uint64_t stream, std::size_t count) {
        std::vector<Cell> cells(count);
        parallel_for(count, c.workers, [&](std::size_t m) {
            const auto ensemble = cloud(c, atoms, diameter, derive_seed(stream, m));
            const auto guess = guess_pulse(c, atoms, steps);
            const auto opt = flat_kick_pulse(report.best, duration, static_cast<double>(atoms), steps + 1, ro.omega_max);
            cells[m] = {objective(guess, ensemble), objective(opt, ensemble)};
        });
        return cells;
    };

    CsvTable table({"diameter_um", "atoms", "eps_gauss_mean", "eps_gauss_stderr", "eps_opt_mean", "eps_opt_stderr",
                    "realizations"});
    CsvTable records({"table", "diameter_um", "atoms", "realization", "eps_gauss", "eps_opt"});
    auto summarise = [&](CsvTable& t, const std::string& tag, std::size_t atoms, double diameter,
                         const std::vector<Cell>& cells) {
        std::vector<double> g, o;
        for (std::size_t m = 0; m < cells.size(); ++m) {
            g.push_back(cells[m].eps_gauss);
            o.push_back(cells[m].eps_opt);
            records.add({tag, num(diameter), num(atoms), num(m), num(cells[m].eps_gauss), num(cells[m].eps_opt)});
        }
        const auto sg = stats(g), so = stats(o);
        t.add({num(diameter), num(atoms), num(sg.mean), num(sg.stderr_), num(so.mean), num(so.stderr_),
               num(cells.size())});
        return std::pair{sg, so};
    };
    json sweep = json::array();
    for (std::size_t d = 0; d < c.cloud.diameters_um.size(); ++d) {
        const double diameter = c.cloud.diameters_um[d];
        const auto cells = evaluate(c.cloud.atoms, diameter, derive_seed(derive_seed(c.seed, 1), d), c.cloud.realizations);
        const auto [sg, so] = summarise(table, "diameter", c.cloud.atoms, diameter, cells);
        sweep.push_back({{"diameter_um", diameter}, {"eps_gauss_mean", sg.mean}, {"eps_opt_mean", so.mean}});
    }
    table.write(out / "cloud_sweep.csv");

    // 3. Inset: dependence on N at fixed diameter.
    CsvTable inset(table.header());
    std::vector<double> inset_means;
    for (std::size_t k = 0; k < c.cloud.inset_atoms.size(); ++k) {
        const std::size_t atoms = c.cloud.inset_atoms[k];
        const auto cells = evaluate(atoms, c.cloud.inset_diameter_um, derive_seed(derive_seed(c.seed, 2), atoms),
                                    c.cloud.realizations);
        inset_means.push_back(summarise(inset, "inset", atoms, c.cloud.inset_diameter_um, cells).second.mean);
    }
    if (!c.cloud.inset_atoms.empty()) inset.write(out / "cloud_inset.csv");
    records.write(out / "cloud_records.csv");

    json summary = {{"template", template_to_json(report.best)},
                    {"training_initial_mean", report.initial_mean_infidelity},
                    {"training_best_mean", report.best_mean_infidelity},
                    {"training_evaluations", report.evaluations},
                    {"sweep", sweep}};
    if (!inset_means.empty()) {
        const auto [lo, hi] = std::minmax_element(inset_means.begin(), inset_means.end());
        summary["inset_spread"] = *hi - *lo;
    }
    return summary;
}

json run_model_check(const Config& c, const fs::path& out) {
    const auto& mc = c.model_check;
    const auto model = c.model.build();
    const std::size_t n = mc.atoms;
    const ControlPulse pulse =
        mc.pulse == "gaussian"
            ? guess_pulse(c, n, mc.trotter_steps)
            : flat_kick_pulse(FlatKickTemplate::pi_areas(c.pulse.duration_ns), c.pulse.duration_ns,
                              static_cast<double>(n), mc.trotter_steps + 1, omega_max(c));
    ComparisonOptions options;
    options.n_steps = mc.trotter_steps;
    options.quadrature.rel_tol = mc.rel_tol;
    options.cloud_radius = 0.5 * mc.diameter_um;

    std::vector<ModelComparison> results(mc.realizations);
    parallel_for(mc.realizations, c.workers, [&](std::size_t m) {
        CloudOptions co;
        co.min_distance = c.cloud.min_distance_um;
        const auto ensemble = sample_cloud(n, mc.diameter_um, derive_seed(c.seed, m), co);
        results[m] = model_vs_simulation(ensemble, model, pulse, options);
    });

    CsvTable scatter({"realization", "atom", "r_um", "simulated_single", "simulated_missing", "simulated_multiple",
                      "discrete_p", "continuum_p", "continuum_p_printed", "continuum_missing"});
    std::vector<double> sim, theory;
    double sq = 0.0;
    for (std::size_t m = 0; m < results.size(); ++m) {
        for (std::size_t i = 0; i < results[m].atoms.size(); ++i) {
            const auto& a = results[m].atoms[i];
            scatter.add({num(m), num(i), num(a.radius), num(a.simulated_single), num(a.simulated_missing),
                         num(a.simulated_multiple), num(a.discrete_p), num(a.continuum_p),
                         num(a.continuum_p_printed), num(a.continuum_missing)});
            sim.push_back(a.simulated_missing);
            theory.push_back(a.continuum_missing);
            sq += std::pow(a.simulated_missing - a.continuum_missing, 2);
        }
    }
    scatter.write(out / "model_scatter.csv");

    const double c_coupling = results.front().coupling_c;
    const BlockadeErrorModel blockade{c_coupling, options.cloud_radius, n};
    QuadratureOptions standard = options.quadrature, printed = options.quadrature;
    printed.measure = SphereMeasure::Printed;
    CsvTable curve({"r_um", "continuum_p", "continuum_p_printed", "continuum_missing"});
    for (std::size_t k = 0; k < mc.curve_points; ++k) {
        const double r = options.cloud_radius * static_cast<double>(k) / static_cast<double>(mc.curve_points - 1);
        const double p = continuum_p(r, blockade, standard).value;
        curve.add({num(r), num(p), num(continuum_p(r, blockade, printed).value), num(1.0 / static_cast<double>(n) - p)});
    }
    curve.write(out / "model_curve.csv");

    return {{"atoms", n},
            {"realizations", mc.realizations},
            {"diameter_um", mc.diameter_um},
            {"pulse", mc.pulse},
            {"coupling_c", c_coupling},
            {"correlation", pearson(sim, theory)},
            {"rms_deviation", std::sqrt(sq / static_cast<double>(sim.size()))}};
}

json run_directionality_sweep(const Config& c, const fs::path& out) {
    const auto& dc = c.directionality;
    const double duration = c.pulse.duration_ns;
    const std::size_t steps = dc.trotter_steps;
    const double wmax = omega_max(c);

    FlatKickTemplate shape = FlatKickTemplate::pi_areas(duration);
    std::string template_source = "pi-areas";
    if (dc.template_shape) {
        shape = *dc.template_shape;
        template_source = "config";
    } else if (!dc.template_file.empty()) {
        fs::path p = dc.template_file;
        if (p.is_relative()) p = c.base_dir / p;
        json j;
        try {
            j = read_json(p);
        } catch (const std::exception& e) {
            throw ConfigError("directionality.template_file: " + std::string(e.what()));
        }
        shape = template_from_json(j.contains("template") ? j.at("template") : j);
        if (!shape.feasible(duration)) throw ConfigError("directionality.template_file: infeasible template");
        template_source = p.string();
    }

    std::vector<SweepPulse> pulses{
        {"optimized",
         [&](double mean) { return flat_kick_pulse(shape, duration, mean, steps + 1, wmax); }, false},
        {"gaussian",
         [&](double mean) {
             const auto atoms = static_cast<std::size_t>(std::max(1L, std::lround(mean)));
             return gaussian_pi_guess(duration, atoms, steps + 1, c.pulse.guess, wmax);
         },
         true}};

    DirectionalitySweepOptions so;
    so.temperatures_c = dc.temperatures_c;
    so.radius = dc.radius_um;
    so.reduced_radius_factor = dc.reduced_radius_factor;
    so.realizations = dc.realizations;
    so.seed = c.seed;
    so.workers = c.workers;
    so.n_steps = steps;
    so.wavelengths = c.model.wavelengths;
    so.ke = wavenumber(c.model.emission_wavelength_um);
    so.emission.cone_half_angle = dc.cone_half_angle;
    so.emission.decay_window = dc.decay_window_ns;
    so.emission.tau = c.model.tau2_ns;
    so.emission.average = dc.average;
    so.emission.cone_polar = dc.cone_polar;
    so.emission.cone_azimuthal = dc.cone_azimuthal;
    const auto table = temperature_sweep(pulses, so);

    CsvTable rows({"temperature_c", "geometry", "pulse", "radius_um", "mean_atoms", "mean_excited", "mean_p",
                   "stderr_p", "realizations"});
    for (const auto& r : table.rows) {
        rows.add({num(r.temperature_c), geometry_tag(r.geometry), r.pulse, num(r.radius), num(r.mean_atoms),
                  num(r.mean_excited), num(r.mean_p), num(r.stderr_p), num(r.realizations)});
    }
    rows.write(out / "directionality.csv");
    CsvTable records({"temperature_c", "geometry", "pulse", "realization", "atoms", "excited_population", "p"});
    for (const auto& r : table.records) {
        records.add({num(r.temperature_c), geometry_tag(r.geometry), r.pulse, num(r.index), num(r.atoms),
                     num(r.excited_population), num(r.p)});
    }
    records.write(out / "directionality_records.csv");

    json improvement = json::array();
    for (double t : dc.temperatures_c) {
        for (auto g : so.geometries) {
            const double po = table.row(t, g, "optimized").mean_p;
            const double pg = table.row(t, g, "gaussian").mean_p;
            improvement.push_back({{"temperature_c", t},
                                   {"geometry", geometry_tag(g)},
                                   {"p_optimized", po},
                                   {"p_gaussian", pg},
                                   {"relative_improvement", pg > 0.0 ? (po - pg) / pg : 0.0}});
        }
    }

    if (dc.inset) {
        // Emission pattern of one realisation nearest 220 C, anti-parallel, optimised pulse.
        const auto it = std::min_element(dc.temperatures_c.begin(), dc.temperatures_c.end(),
                                         [](double a, double b) { return std::abs(a - 220.0) < std::abs(b - 220.0); });
        const double t = *it;
        const auto ti = static_cast<std::size_t>(it - dc.temperatures_c.begin());
        const auto vapor = vapor_conditions(t, so.density);
        const double mean = vapor.density * 4.0 / 3.0 * kPi * std::pow(dc.radius_um, 3);
        const auto ensemble = atoms_in_sphere(t, dc.radius_um, derive_seed(derive_seed(derive_seed(c.seed, ti), 0), 0),
                                              so.density);
        const auto model = PhysicalModel::rubidium87(LaserGeometry::AntiParallel, c.model.wavelengths);
        const auto state = prepare_w(ensemble, model, pulses.front().make(mean), steps, so.ke);
        auto eo = so.emission;
        eo.grid_polar = dc.inset_polar;
        eo.grid_azimuthal = dc.inset_azimuthal;
        const auto dist = angular_distribution(state, eo);
        const Vec3 axis = forward_axis(state);
        CsvTable angular({"theta_rad", "phi_rad", "x", "y", "z", "weight_sr", "intensity"});
        for (std::size_t d = 0; d < dist.grid.directions.size(); ++d) {
            const auto& n = dist.grid.directions[d];
            const std::size_t col = d % dc.inset_azimuthal;  // grid is polar-major
            angular.add({num(std::acos(std::clamp(n.dot(axis), -1.0, 1.0))),
                         num(kTwoPi * static_cast<double>(col) / static_cast<double>(dc.inset_azimuthal)),
                         num(n.x()), num(n.y()), num(n.z()), num(dist.grid.weights[d]), num(dist.intensity[d])});
        }
        angular.write(out / "directionality_inset.csv");
    }

    return {{"template_source", template_source},
            {"template", template_to_json(shape)},
            {"realizations", dc.realizations},
            {"improvement", improvement}};
}

json run_experiment(const Config& config, const fs::path& out) {
    validate(config);
    fs::create_directories(out);
    write_json(out / "resolved_config.json", to_json(config));
    json body;
    switch (config.experiment) {
        case Experiment::ChainSweep: body = run_chain_sweep(config, out); break;
        case Experiment::CloudSweep: body = run_cloud_sweep(config, out); break;
        case Experiment::ModelCheck: body = run_model_check(config, out); break;
        case Experiment::DirectionalitySweep: body = run_directionality_sweep(config, out); break;
        case Experiment::Optimize: body = run_optimize(config, out); break;
    }
    json summary = {{"experiment", to_string(config.experiment)},
                    {"seed", config.seed},
                    {"version", version()},
                    {"paper_scale", config.paper},
                    {"results", body}};
    write_json(out / "summary.json", summary);
    return summary;
}

}  // namespace rydberg::cli
