#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "fracvar/errors.hpp"

namespace fracvar::cli {

namespace {

const std::pair<const char*, Command> kCommands[] = {
    {"op-apply", Command::OpApply},
    {"ibp-check", Command::IbpCheck},
    {"el-residual", Command::ElResidual},
    {"dirichlet-solve", Command::DirichletSolve},
    {"noether-check", Command::NoetherCheck},
    {"wave-residual", Command::WaveResidual},
    {"convergence-sweep", Command::ConvergenceSweep},
};

ParamSet pset_from(const Node& node) {
    if (!node.is_object()) node.fail("expected an object {\"p\": ..., \"q\": ...}");
    // Endpoints are filled in from the domain.
    ParamSet p;
    p.p = node.at("p").number();
    p.q = node.at("q").number();
    return p;
}

KernelSpec kernel_from(const Node& node, double order) {
    const std::string family = node.is_string() ? node.string() : node.at("family").string();
    if (family == "riemann-liouville" || family == "rl") {
        return KernelSpec::riemann_liouville(order);
    }
    if (family == "constant") return KernelSpec::constant();
    if (family != "tabulated") node.fail("unknown kernel family '" + family + "'");
    std::vector<std::pair<double, double>> samples;
    if (node.has("samples")) {
        const Node s = node.at("samples");
        for (std::size_t i = 0; i < s.size(); ++i) {
            const Node pair = s.at(i);
            if (pair.size() != 2) pair.fail("expected [s, value]");
            samples.emplace_back(pair.at(0).number(), pair.at(1).number());
        }
    } else {
        const Expression e = expressions(node.at("expression"), 1).front();
        const Node range = node.at("range");
        const double lo = range.at(0).number();
        const double hi = range.at(1).number();
        const int count = node.integer_or("count", 4096);
        if (count < 2 || !(lo > 0.0) || !(hi > lo)) node.fail("need 0 < range[0] < range[1] and count >= 2");
        for (int j = 0; j < count; ++j) {
            const double s = lo + (hi - lo) * j / (count - 1);
            samples.emplace_back(s, e(std::span<const double>(&s, 1)));
        }
    }
    try {
        return KernelSpec::tabulated(std::move(samples));
    } catch (const Error& err) {
        node.fail(err.what());
    }
}

// Value shared by every axis at `single`, per-axis array at `multi`, else the fallback.
template <typename T, typename Parse>
std::vector<T> per_axis(const Node& problem, const std::string& single, const std::string& multi,
                        std::size_t dims, const std::vector<T>* fallback, Parse&& parse) {
    if (problem.has(multi)) {
        const Node arr = problem.at(multi);
        if (!arr.is_array() || arr.size() != dims) {
            arr.fail("expected an array with one entry per axis (" + std::to_string(dims) + ")");
        }
        std::vector<T> out;
        for (std::size_t i = 0; i < dims; ++i) out.push_back(parse(arr.at(i), i));
        return out;
    }
    if (problem.has(single)) {
        const Node one = problem.at(single);
        std::vector<T> out;
        for (std::size_t i = 0; i < dims; ++i) out.push_back(parse(one, i));
        return out;
    }
    if (fallback) return *fallback;
    problem.fail("missing '" + single + "' (or '" + multi + "')");
}

Tolerances tolerances_from(const Node& root) {
    Tolerances t;
    if (!root.has("tolerances")) return t;
    const Node tol = root.at("tolerances");
    auto opt = [&](const char* key, std::optional<double>& slot) {
        if (tol.has(key)) slot = tol.at(key).number();
    };
    opt("residual_max", t.residual_max);
    opt("error_max", t.error_max);
    opt("order_min", t.order_min);
    opt("order_max", t.order_max);
    opt("energy_max", t.energy_max);
    opt("gradient_max", t.gradient_max);
    opt("bvp_max", t.bvp_max);
    opt("chain_max", t.chain_max);
    opt("noether_max", t.noether_max);
    if (tol.has("decreasing")) t.decreasing = tol.at("decreasing").boolean();
    return t;
}

Problem problem_from(const Node& node) {
    Problem p;
    if (node.has("domain")) {
        const Node d = node.at("domain");
        if (!d.is_array() || d.size() == 0) d.fail("expected a non-empty array of [a, b] intervals");
        for (std::size_t i = 0; i < d.size(); ++i) {
            const Node iv = d.at(i);
            if (iv.size() != 2) iv.fail("expected [a, b]");
            const double a = iv.at(0).number();
            const double b = iv.at(1).number();
            if (!(a < b)) iv.fail("need a < b");
            p.domain.emplace_back(a, b);
        }
    } else {
        p.domain = {{0.0, 1.0}};
    }
    const std::size_t dims = p.domain.size();
    p.components = node.integer_or("components", 1);
    if (p.components < 1) node.at("components").fail("need at least one component");

    auto as_pset = [&](const Node& n, std::size_t i) {
        ParamSet ps = pset_from(n);
        ps.a = p.domain[i].first;
        ps.b = p.domain[i].second;
        return ps;
    };
    const ParamSet left = ParamSet::left(0.0, 1.0);
    std::vector<ParamSet> default_psets;
    for (std::size_t i = 0; i < dims; ++i) {
        ParamSet ps = left;
        ps.a = p.domain[i].first;
        ps.b = p.domain[i].second;
        default_psets.push_back(ps);
    }
    p.psets1 = per_axis<ParamSet>(node, "pset", "psets", dims, &default_psets, as_pset);
    p.psets2 = per_axis<ParamSet>(node, "pset2", "psets2", dims, &p.psets1, as_pset);

    auto as_number = [](const Node& n, std::size_t) { return n.number(); };
    p.alphas = per_axis<double>(node, "alpha", "alphas", dims, nullptr, as_number);
    p.betas = per_axis<double>(node, "beta", "betas", dims, &p.alphas, as_number);

    const std::vector<KernelSpec> default_kernels = [&] {
        std::vector<KernelSpec> k;
        for (std::size_t i = 0; i < dims; ++i) k.push_back(KernelSpec::riemann_liouville(p.alphas[i]));
        return k;
    }();
    auto as_kernel_alpha = [&](const Node& n, std::size_t i) { return kernel_from(n, p.alphas[i]); };
    auto as_kernel_beta = [&](const Node& n, std::size_t i) { return kernel_from(n, p.betas[i]); };
    p.kernels_alpha = per_axis<KernelSpec>(node, "kernel", "kernels", dims, &default_kernels, as_kernel_alpha);
    if (node.has("kernel2") || node.has("kernels2")) {
        p.kernels_beta = per_axis<KernelSpec>(node, "kernel2", "kernels2", dims, nullptr, as_kernel_beta);
    } else {
        for (std::size_t i = 0; i < dims; ++i) p.kernels_beta.push_back(p.kernels_alpha[i].at_order(p.betas[i]));
    }
    return p;
}

}  // namespace

Command command_from_string(const std::string& name) {
    for (const auto& [key, cmd] : kCommands) {
        if (name == key) return cmd;
    }
    throw ConfigError("command: unknown command '" + name + "'");
}

std::string to_string(Command cmd) {
    for (const auto& [key, c] : kCommands) {
        if (c == cmd) return key;
    }
    return "?";
}

bool Node::has(const std::string& key) const { return value_->is_object() && value_->contains(key); }

Node Node::at(const std::string& key) const {
    if (!value_->is_object()) fail("expected an object");
    auto it = value_->find(key);
    if (it == value_->end()) fail("missing field '" + key + "'");
    return Node(*it, path_.empty() ? key : path_ + "." + key);
}

Node Node::at(std::size_t index) const {
    if (!value_->is_array()) fail("expected an array");
    if (index >= value_->size()) fail("index " + std::to_string(index) + " out of range");
    return Node((*value_)[index], path_ + "[" + std::to_string(index) + "]");
}

std::size_t Node::size() const {
    if (!value_->is_array()) fail("expected an array");
    return value_->size();
}

double Node::number() const {
    if (!value_->is_number()) fail("expected a number");
    return value_->get<double>();
}

int Node::integer() const {
    if (!value_->is_number_integer()) fail("expected an integer");
    return value_->get<int>();
}

bool Node::boolean() const {
    if (!value_->is_boolean()) fail("expected true or false");
    return value_->get<bool>();
}

std::string Node::string() const {
    if (!value_->is_string()) fail("expected a string");
    return value_->get<std::string>();
}

double Node::number_or(const std::string& key, double fallback) const {
    return has(key) ? at(key).number() : fallback;
}

int Node::integer_or(const std::string& key, int fallback) const {
    return has(key) ? at(key).integer() : fallback;
}

std::string Node::string_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? at(key).string() : fallback;
}

void Node::fail(const std::string& message) const {
    throw ConfigError((path_.empty() ? std::string("config") : path_) + ": " + message);
}

std::vector<Expression> expressions(const Node& node, int arity, bool allow_u) {
    std::vector<Expression> out;
    auto one = [&](const Node& n) {
        try {
            out.push_back(Expression::parse(n.string(), arity, allow_u));
        } catch (const ParseError& e) {
            n.fail(e.what());
        } catch (const ArityError& e) {
            n.fail(e.what());
        }
    };
    if (node.is_array()) {
        for (std::size_t i = 0; i < node.size(); ++i) one(node.at(i));
    } else {
        one(node);
    }
    if (out.empty()) node.fail("expected at least one expression");
    return out;
}

Field sample_field(const GridND& grid, const std::vector<Expression>& exprs) {
    const int N = static_cast<int>(exprs.size());
    Field f(grid, N);
    std::vector<double> t(grid.dims());
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
        grid.coords(node, t);
        for (int k = 0; k < N; ++k) f(k, node) = exprs[k](t);
    }
    return f;
}

Lagrangian lagrangian_from(const Node& problem, int n, int N) {
    const Node name = problem.at("lagrangian");
    LagrangianParams params;
    if (problem.has("lagrangian_params")) {
        const Node lp = problem.at("lagrangian_params");
        params.rho = lp.number_or("rho", params.rho);
        params.stiffness = lp.number_or("stiffness", params.stiffness);
    }
    try {
        return builtin_lagrangian(name.string(), n, N, params);
    } catch (const ConfigError& e) {
        name.fail(e.what());
    }
}

ThirdBlock third_block_from(const Node& problem, const Lagrangian& lag) {
    if (!problem.has("third_block")) return lag.preferred_block();
    const Node node = problem.at("third_block");
    const std::string mode = node.string();
    if (mode == "fractional-integral") return ThirdBlock::FractionalIntegral;
    if (mode == "classical-gradient") return ThirdBlock::ClassicalGradient;
    node.fail("expected 'fractional-integral' or 'classical-gradient'");
}

ExperimentConfig parse_config(const json& doc, const std::string& origin) {
    ExperimentConfig cfg;
    cfg.origin = origin;
    cfg.document = doc;
    const Node root(cfg.document, "");
    if (!root.is_object()) root.fail("top level must be an object");
    cfg.command = command_from_string(root.at("command").string());
    if (root.has("seed")) {
        const Node s = root.at("seed");
        if (!s.raw().is_number_unsigned() && !s.raw().is_number_integer()) s.fail("expected an integer");
        cfg.seed = s.raw().get<std::uint64_t>();
    }
    const Node problem = root.at("problem");
    cfg.problem = problem_from(problem);
    if (root.has("sweep")) {
        const Node sw = root.at("sweep");
        for (std::size_t i = 0; i < sw.size(); ++i) cfg.sweep.push_back(sw.at(i).integer());
        if (cfg.sweep.empty()) sw.fail("sweep must list at least one grid size");
    } else {
        cfg.sweep.push_back(problem.at("n").integer());
    }
    for (std::size_t i = 0; i < cfg.sweep.size(); ++i) {
        const int n = cfg.sweep[i];
        if (n < 2 || n > kMaxCellsPerAxis) {
            throw ConfigError("sweep[" + std::to_string(i) + "]: grid size must lie in [2, " +
                              std::to_string(kMaxCellsPerAxis) + "]");
        }
    }
    cfg.tolerances = tolerances_from(root);
    cfg.output = root.string_or("output", to_string(cfg.command));
    if (cfg.output.empty()) root.at("output").fail("must not be empty");

    // Resolve names and expressions now so errors surface before any work.
    const int dims = static_cast<int>(cfg.problem.domain.size());
    if (problem.has("lagrangian")) lagrangian_from(problem, dims, cfg.problem.components);
    for (const char* key : {"f", "eta", "u", "boundary", "exact", "init"}) {
        if (!problem.has(key)) continue;
        const Node node = problem.at(key);
        if (node.is_string() && (node.string() == "random" || node.string() == "minimizer")) continue;
        expressions(node, dims);
    }
    if (problem.has("generator")) expressions(problem.at("generator"), dims, true);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into a line number.
        const std::size_t offset = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n');
        throw ConfigError(path + ":" + std::to_string(line) + ": malformed config: " + e.what());
    }
    return parse_config(doc, path);
}

GridND make_grid(const Problem& problem, int n) { return GridND::uniform(problem.domain, n); }

}  // namespace fracvar::cli
