#include <chrono>
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <rydberg/units.hpp>

#include "rydberg_cli/config.hpp"
#include "rydberg_cli/io.hpp"
#include "rydberg_cli/runners.hpp"

namespace {

using namespace rydberg;
using namespace rydberg::cli;

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::string out;
    bool paper = false;
};

Config resolve(Experiment verb, const Flags& f) {
    Config c;
    if (!f.config.empty()) {
        nlohmann::json raw;
        try {
            raw = read_json(f.config);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
        if (!raw.is_object()) throw ConfigError("config root must be an object");
        if (raw.contains("experiment") && raw["experiment"].is_string() &&
            raw["experiment"].get<std::string>() != to_string(verb)) {
            throw ConfigError("config experiment '" + raw["experiment"].get<std::string>() +
                              "' does not match verb '" + to_string(verb) + "'");
        }
        raw["experiment"] = to_string(verb);
        c = parse_config(raw);
        c.base_dir = std::filesystem::path(f.config).parent_path();
    }
    c.experiment = verb;
    if (f.seed) c.seed = *f.seed;
    if (f.workers) c.workers = *f.workers;
    if (!f.out.empty()) c.output = f.out;
    if (f.paper) apply_paper_scale(c);
    validate(c);
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rydberg W-state preparation and directional emission experiments"};
    app.set_version_flag("--version", version());
    app.require_subcommand(1);

    Flags flags;
    std::optional<Experiment> chosen;
    for (auto e : {Experiment::ChainSweep, Experiment::CloudSweep, Experiment::ModelCheck,
                   Experiment::DirectionalitySweep, Experiment::Optimize}) {
        auto* sub = app.add_subcommand(to_string(e));
        sub->add_option("--config", flags.config, "JSON experiment config")->check(CLI::ExistingFile);
        sub->add_option("--seed", flags.seed, "master seed");
        sub->add_option("--workers", flags.workers, "worker threads (0 = all cores)");
        sub->add_option("--out", flags.out, "output directory");
        sub->add_flag("--paper", flags.paper, "full-scale realization counts and budgets");
        sub->callback([&chosen, e] { chosen = e; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    Config config;
    try {
        config = resolve(*chosen, flags);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    try {
        const auto start = std::chrono::steady_clock::now();
        run_experiment(config, config.output);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        std::cerr << to_string(config.experiment) << ": wrote " << config.output << " in " << elapsed.count()
                  << " s\n";
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
