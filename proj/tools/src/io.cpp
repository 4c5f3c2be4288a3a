#include "rydberg_cli/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef RYDBERG_VERSION
#define RYDBERG_VERSION "0.0.0"
#endif

namespace rydberg::cli {

using nlohmann::json;

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::add(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw std::logic_error("CsvTable: row width != header width");
    rows_.push_back(std::move(cells));
    return *this;
}

void CsvTable::write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
}

CsvTable CsvTable::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty table");
    CsvTable table(split(line));
    while (std::getline(in, line)) {
        if (!line.empty()) table.add(split(line));
    }
    return table;
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return json::parse(in);
}

json checkpoint_to_json(const OptimizationReport& r, const OptimizerOptions& o) {
    return {{"seed", r.seed},
            {"basis_size", o.basis_size},
            {"budget", o.budget},
            {"initial_step", o.initial_step},
            {"collapse_tolerance", o.collapse_tolerance},
            {"form", o.form == CrabForm::Multiplicative ? "multiplicative" : "additive"},
            {"phase_modulation", o.phase_modulation},
            {"omega_max_rad_per_ns", o.omega_max},
            {"dithers_gr", r.best_dithers_gr},
            {"dithers_re", r.best_dithers_re},
            {"coefficients", r.best_coefficients},
            {"best_infidelity", r.best_infidelity},
            {"guess_infidelity", r.guess_infidelity},
            {"evaluations", r.evaluations},
            {"restarts", r.restarts},
            {"trace", r.trace}};
}

OptimizationReport checkpoint_from_json(const json& j, OptimizerOptions& o) {
    OptimizationReport r;
    r.seed = j.at("seed").get<std::uint64_t>();
    o.seed = r.seed;
    o.basis_size = j.at("basis_size").get<std::size_t>();
    o.budget = j.at("budget").get<std::size_t>();
    o.initial_step = j.at("initial_step").get<double>();
    o.collapse_tolerance = j.at("collapse_tolerance").get<double>();
    o.form = j.at("form").get<std::string>() == "additive" ? CrabForm::Additive : CrabForm::Multiplicative;
    o.phase_modulation = j.at("phase_modulation").get<bool>();
    o.omega_max = j.at("omega_max_rad_per_ns").get<double>();
    r.best_dithers_gr = j.at("dithers_gr").get<std::vector<double>>();
    r.best_dithers_re = j.at("dithers_re").get<std::vector<double>>();
    r.best_coefficients = j.at("coefficients").get<std::vector<double>>();
    r.best_infidelity = j.at("best_infidelity").get<double>();
    r.guess_infidelity = j.at("guess_infidelity").get<double>();
    r.evaluations = j.at("evaluations").get<std::size_t>();
    r.restarts = j.at("restarts").get<std::size_t>();
    r.trace = j.at("trace").get<std::vector<double>>();
    return r;
}

std::string version() { return RYDBERG_VERSION; }

}  // namespace rydberg::cli
