#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fracvar/core_model.hpp"
#include "fracvar/expr.hpp"
#include "fracvar/variational.hpp"

namespace fracvar::cli {

using json = nlohmann::json;

enum class Command { OpApply, IbpCheck, ElResidual, DirichletSolve, NoetherCheck, WaveResidual, ConvergenceSweep };

Command command_from_string(const std::string& name);
std::string to_string(Command cmd);

// A json node plus its dotted path, for ConfigError diagnostics.
class Node {
public:
    Node(const json& value, std::string path) : value_(&value), path_(std::move(path)) {}

    const std::string& path() const { return path_; }
    const json& raw() const { return *value_; }

    bool has(const std::string& key) const;
    Node at(const std::string& key) const;  // ConfigError when missing
    Node at(std::size_t index) const;
    std::size_t size() const;
    bool is_array() const { return value_->is_array(); }
    bool is_string() const { return value_->is_string(); }
    bool is_object() const { return value_->is_object(); }

    double number() const;
    int integer() const;
    bool boolean() const;
    std::string string() const;

    double number_or(const std::string& key, double fallback) const;
    int integer_or(const std::string& key, int fallback) const;
    std::string string_or(const std::string& key, const std::string& fallback) const;

    [[noreturn]] void fail(const std::string& message) const;

private:
    const json* value_;
    std::string path_;
};

struct Tolerances {
    std::optional<double> residual_max;
    std::optional<double> error_max;
    std::optional<double> order_min;
    std::optional<double> order_max;
    std::optional<double> energy_max;
    std::optional<double> gradient_max;
    std::optional<double> bvp_max;
    std::optional<double> chain_max;
    std::optional<double> noether_max;
    bool decreasing = false;
};

// The problem block, resolved into library types for one grid size.
struct Problem {
    std::vector<std::pair<double, double>> domain;
    int components = 1;
    std::vector<ParamSet> psets1;  // endpoints patched per axis from domain
    std::vector<ParamSet> psets2;
    std::vector<double> alphas;
    std::vector<double> betas;
    std::vector<KernelSpec> kernels_alpha;
    std::vector<KernelSpec> kernels_beta;
};

struct ExperimentConfig {
    Command command = Command::OpApply;
    std::string origin;  // config file path
    json document;
    std::vector<int> sweep;
    std::uint64_t seed = 42;
    std::string output;  // output file stem
    Tolerances tolerances;
    Problem problem;
};

ExperimentConfig parse_config(const json& doc, const std::string& origin);
ExperimentConfig load_config(const std::string& path);

GridND make_grid(const Problem& problem, int n);

// Expression or array of expressions (one per component).
std::vector<Expression> expressions(const Node& node, int arity, bool allow_u = false);

// Samples one expression per component on the grid.
Field sample_field(const GridND& grid, const std::vector<Expression>& exprs);

Lagrangian lagrangian_from(const Node& problem, int n, int N);
ThirdBlock third_block_from(const Node& problem, const Lagrangian& lag);

}  // namespace fracvar::cli
