#include <iostream>

#include "CLI11.hpp"

#include "cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generalized fractional operators, identities and variational problems"};
    std::string config;
    std::string output_dir;
    fracvar::cli::RunOptions opts;
    app.add_option("config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    app.add_option("--output-dir", output_dir, "Directory for CSV and summary output");
    app.add_option("--jobs", opts.jobs, "Sweep entries run concurrently")->check(CLI::PositiveNumber);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : fracvar::cli::kError;
    }
    if (!output_dir.empty()) opts.output_dir = output_dir;
    return fracvar::cli::run(config, opts, std::cerr);
}
