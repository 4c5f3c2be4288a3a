#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "rydberg_cli/config.hpp"

namespace rydberg::cli {

// Each runner writes its tables into `out` and returns the summary record.
nlohmann::json run_chain_sweep(const Config& config, const std::filesystem::path& out);
nlohmann::json run_cloud_sweep(const Config& config, const std::filesystem::path& out);
nlohmann::json run_model_check(const Config& config, const std::filesystem::path& out);
nlohmann::json run_directionality_sweep(const Config& config, const std::filesystem::path& out);
nlohmann::json run_optimize(const Config& config, const std::filesystem::path& out);

/// Validates, creates `out`, echoes the resolved config, dispatches on the
/// experiment and writes summary.json (with seed and version stamp).
nlohmann::json run_experiment(const Config& config, const std::filesystem::path& out);

/// Pulse samples as CSV: t_ns, gr_re, gr_im, re_re, re_im (rad/ns).
void write_pulse(const std::filesystem::path& path, const ControlPulse& pulse);

}  // namespace rydberg::cli
