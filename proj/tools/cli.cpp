#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "fracvar/errors.hpp"

namespace fracvar::cli {

namespace fs = std::filesystem;

std::string format_number(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_csv(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c) out += ',';
        out += columns[c];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_number(row[c]);
        }
        out += '\n';
    }
    return out;
}

void write_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw Error("cannot write " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string resolve_output_dir(const RunOptions& opts) {
    if (opts.output_dir) return *opts.output_dir;
    if (const char* env = std::getenv("FRACVAR_OUTPUT_DIR"); env && *env) return env;
    return ".";
}

namespace {

json summary_json(const ExperimentConfig& cfg, const Report& rep, const std::string& csv_path) {
    json s;
    s["command"] = to_string(cfg.command);
    s["config"] = cfg.origin;
    s["csv"] = csv_path;
    s["seed"] = cfg.seed;
    s["sweep"] = cfg.sweep;
    s["status"] = rep.passed() ? "pass" : "fail";
    s["checks"] = json::array();
    for (const Check& c : rep.checks) {
        s["checks"].push_back({{"name", c.name},
                               {"value", c.value},
                               {"limit", c.limit},
                               {"relation", c.relation},
                               {"pass", c.pass}});
    }
    json last = json::object();
    for (std::size_t c = 0; c < rep.columns.size(); ++c) {
        const double v = rep.rows.back()[c];
        last[rep.columns[c]] = std::isnan(v) ? json(nullptr) : json(v);
    }
    s["final_row"] = last;
    for (const auto& [key, value] : rep.extra.items()) s[key] = value;
    return s;
}

}  // namespace

int run(const std::string& config_path, const RunOptions& opts, std::ostream& log) {
    try {
        const ExperimentConfig cfg = load_config(config_path);
        const Report rep = execute(cfg, opts.jobs);
        const fs::path dir(resolve_output_dir(opts));
        const std::string csv_path = (dir / (cfg.output + ".csv")).string();
        write_atomic(csv_path, to_csv(rep.columns, rep.rows));
        if (rep.field) {
            write_atomic((dir / (cfg.output + ".field.csv")).string(), to_csv(rep.field->first, rep.field->second));
        }
        write_atomic((dir / (cfg.output + ".summary.json")).string(), summary_json(cfg, rep, csv_path).dump(2) + "\n");
        for (const Check& c : rep.checks) {
            log << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << format_number(c.value) << " (" << c.relation
                << ' ' << format_number(c.limit) << ")\n";
        }
        return rep.passed() ? kPass : kToleranceFailure;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
    }
    return kError;
}

}  // namespace fracvar::cli
