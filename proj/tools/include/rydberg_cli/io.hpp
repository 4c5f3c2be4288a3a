#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <rydberg/control.hpp>

namespace rydberg::cli {

/// Shortest decimal form that parses back to the same double.
std::string format_number(double v);

/// Comma-separated table with a header line; cells are written verbatim.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    CsvTable& add(std::vector<std::string> cells);
    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }
    void write(const std::filesystem::path& path) const;
    static CsvTable read(const std::filesystem::path& path);

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// Optimisation checkpoint: seed, settings, dithers, coefficients and the
/// full evaluation trace, enough to rebuild the best pulse.
nlohmann::json checkpoint_to_json(const OptimizationReport& report, const OptimizerOptions& options);
OptimizationReport checkpoint_from_json(const nlohmann::json& j, OptimizerOptions& options);

std::string version();

}  // namespace rydberg::cli
