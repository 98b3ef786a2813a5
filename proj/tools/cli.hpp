#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace fracvar::cli {

enum ExitCode : int { kPass = 0, kError = 1, kToleranceFailure = 2 };

struct RunOptions {
    std::optional<std::string> output_dir;  // overrides FRACVAR_OUTPUT_DIR
    int jobs = 1;                           // sweep entries run concurrently
};

struct Check {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    std::string relation;  // "<=", ">=" or "=="
    bool pass = false;
};

struct Report {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;  // NaN cells are written empty
    std::vector<Check> checks;
    json extra = json::object();
    // Optional additional CSV (e.g. sampled operator output).
    std::optional<std::pair<std::vector<std::string>, std::vector<std::vector<double>>>> field;

    bool passed() const;
};

Report execute(const ExperimentConfig& cfg, int jobs);

std::string format_number(double v);
std::string to_csv(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows);

// Writes via a temporary file and rename.
void write_atomic(const std::string& path, const std::string& content);

std::string resolve_output_dir(const RunOptions& opts);

// Loads, runs and writes <dir>/<output>.csv and <dir>/<output>.summary.json.
// Diagnostics go to `log`.
int run(const std::string& config_path, const RunOptions& opts, std::ostream& log);

}  // namespace fracvar::cli
