#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vesselkit/io.hpp"

namespace vesselkit::cli {

struct RunOptions {
    std::optional<std::filesystem::path> out_dir; // overrides the config "out"
    std::optional<std::size_t> steps;             // overrides grid steps
    std::optional<std::uint64_t> seed;            // overrides the config "seed"
};

struct Check {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct RunResult {
    io::json report;
    std::vector<Check> checks;
    std::vector<std::filesystem::path> artifacts;
    bool passed() const;
};

const std::vector<std::string>& scenario_kinds();

// Runs one scenario and writes report.json plus CSV curves into the output directory.
RunResult run_scenario(const io::json& config, const RunOptions& opts);

// 0 on success, 2 when a check exceeds its threshold, 1 on errors (diagnostic on err).
int run_file(const std::filesystem::path& config_path, const RunOptions& opts, std::ostream& out, std::ostream& err);

io::json fixtures_json();

} // namespace vesselkit::cli
