#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <thread>

#include "cli.hpp"
#include "fracvar/dirichlet.hpp"
#include "fracvar/errors.hpp"
#include "fracvar/frac_ops.hpp"
#include "fracvar/ibp_verify.hpp"
#include "fracvar/noether.hpp"
#include "fracvar/variational.hpp"

namespace fracvar::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Row = std::vector<double>;

// Everything one sweep entry needs, resolved for its grid size.
struct Context {
    const ExperimentConfig& cfg;
    Node problem;
    int n;
    GridND grid;
    int dims;

    Context(const ExperimentConfig& c, int cells)
        : cfg(c),
          problem(Node(c.document, "").at("problem")),
          n(cells),
          grid(make_grid(c.problem, cells)),
          dims(grid.dims()) {}

    std::uint64_t seed() const { return cfg.seed + static_cast<std::uint64_t>(n); }

    int axis() const {
        const int a = problem.integer_or("axis", 0);
        if (a < 0 || a >= dims) problem.at("axis").fail("axis out of range");
        return a;
    }

    Field field(const std::string& key) const { return sample_field(grid, expressions(problem.at(key), dims)); }

    double max_interior(const Field& f) const { return max_abs_interior(f); }
};

double max_interior_diff(const Field& a, const Field& b) { return max_abs_interior(a - b); }

Field random_interior(const GridND& grid, const Field& base, std::uint64_t seed, double amplitude) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-amplitude, amplitude);
    Field out = base;
    for (int k = 0; k < out.components(); ++k) {
        for (std::size_t node = 0; node < grid.node_count(); ++node) {
            if (!grid.on_boundary(node)) out(k, node) += dist(rng);
        }
    }
    return out;
}

ProblemSpec problem_spec(const Context& ctx) {
    const Lagrangian lag = lagrangian_from(ctx.problem, ctx.dims, ctx.cfg.problem.components);
    const auto& p = ctx.cfg.problem;
    ProblemSpec spec{ctx.grid,           lag,
                     p.psets1,           p.psets2,
                     p.alphas,           p.betas,
                     p.kernels_alpha,    p.kernels_beta,
                     third_block_from(ctx.problem, lag),
                     std::nullopt,       1e-12};
    if (ctx.problem.has("boundary")) spec.boundary = ctx.field("boundary");
    return spec;
}

DirichletSpec dirichlet_spec(const Context& ctx) {
    const auto& p = ctx.cfg.problem;
    Field psi = ctx.problem.has("boundary") ? ctx.field("boundary") : Field(ctx.grid, 1);
    if (psi.components() != 1) ctx.problem.at("boundary").fail("Dirichlet boundary data must be scalar");
    DirichletSpec spec{ctx.grid, p.psets1, p.alphas, p.kernels_alpha, std::move(psi)};
    spec.tol = ctx.problem.number_or("tol", spec.tol);
    spec.max_iter = ctx.problem.integer_or("max_iter", spec.max_iter);
    return spec;
}

// ---- op-apply / convergence-sweep ----

const std::vector<std::string> kOpColumns = {"n", "max_abs", "error_max", "order_est"};

Row op_row(const Context& ctx, Field* keep) {
    const int axis = ctx.axis();
    const OpKind kind = op_kind_from_string(ctx.problem.at("operator").string());
    const auto& p = ctx.cfg.problem;
    const double order = kind == OpKind::K ? p.betas[axis] : p.alphas[axis];
    const KernelSpec& kernel = kind == OpKind::K ? p.kernels_beta[axis] : p.kernels_alpha[axis];
    const ParamSet& pset = kind == OpKind::K ? p.psets2[axis] : p.psets1[axis];
    const Field f = ctx.field("f");
    const Field out = apply_partial(kind, order, pset, kernel, f, axis);
    double err = kNaN;
    if (ctx.problem.has("exact")) err = max_interior_diff(out, ctx.field("exact"));
    if (keep) *keep = out;
    return {static_cast<double>(ctx.n), max_abs(out), err, kNaN};
}

// ---- ibp-check ----

const std::vector<std::string> kIbpColumns = {"n",        "lhs",          "rhs",      "boundary_term",
                                              "residual_abs", "residual_rel", "order_est"};

Row ibp_row(const Context& ctx) {
    const int axis = ctx.axis();
    const auto& p = ctx.cfg.problem;
    const std::string check = ctx.problem.string_or("check", "ibp");
    const Field f = ctx.field("f");
    const Field eta = ctx.field("eta");
    IbpReport r;
    if (check == "ibp") {
        r = check_ibp(f, eta, p.psets1[axis], p.alphas[axis], p.kernels_alpha[axis], axis);
    } else if (check == "duality") {
        r = check_K_duality(f, eta, p.psets2[axis], p.betas[axis], p.kernels_beta[axis], axis);
    } else {
        ctx.problem.at("check").fail("expected 'ibp' or 'duality'");
    }
    return {static_cast<double>(ctx.n), r.lhs, r.rhs, r.boundary_term, r.residual, r.residual_rel, kNaN};
}

// ---- el-residual ----

const std::vector<std::string> kElColumns = {"n", "functional", "residual_max"};

Row el_row(const Context& ctx) {
    const ProblemSpec spec = problem_spec(ctx);
    const Field u = ctx.field("u");
    const double functional = evaluate_functional(spec, u);
    const Field res = spec.third_block == ThirdBlock::FractionalIntegral ? el_residual(spec, u)
                                                                         : el_residual_mixed(spec, u);
    return {static_cast<double>(ctx.n), functional, ctx.max_interior(res)};
}

// ---- dirichlet-solve ----

const std::vector<std::string> kDirichletColumns = {"n",          "energy",          "iterations",
                                                    "gradient_norm", "bvp_residual_max", "converged"};

MinimizeResult solve(const Context& ctx, const DirichletSpec& spec, bool& converged) {
    std::optional<Field> init;
    if (ctx.problem.has("init")) {
        const Node node = ctx.problem.at("init");
        if (node.is_string() && node.string() == "random") {
            init = random_interior(ctx.grid, default_init(spec), ctx.seed(), 1.0);
        } else {
            init = ctx.field("init");
            for (std::size_t m = 0; m < ctx.grid.node_count(); ++m) {
                if (ctx.grid.on_boundary(m)) (*init)[m] = spec.boundary[m];
            }
        }
    }
    try {
        converged = true;
        return minimize_energy(spec, init);
    } catch (const NoConvergence& e) {
        converged = false;
        return e.best();
    }
}

Row dirichlet_row(const Context& ctx) {
    const DirichletSpec spec = dirichlet_spec(ctx);
    bool converged = false;
    const MinimizeResult res = solve(ctx, spec, converged);
    const double bvp = max_abs_interior(bvp_residual(spec, res.u));
    return {static_cast<double>(ctx.n), res.energy, static_cast<double>(res.iterations), res.gradient_norm, bvp,
            converged ? 1.0 : 0.0};
}

// ---- noether-check ----

const std::vector<std::string> kNoetherColumns = {"n", "noether_max", "invariance_max", "el_max", "chain_max"};

SymmetryGenerator generator_from(const Context& ctx) {
    const std::vector<Expression> exprs = expressions(ctx.problem.at("generator"), ctx.dims, true);
    SymmetryGenerator gen;
    gen.description = ctx.problem.at("generator").raw().dump();
    gen.xi = [exprs](std::span<const double> t, std::span<const double> u, std::span<double> xi) {
        if (exprs.size() != u.size()) throw LengthMismatch("generator: one expression per component expected");
        for (std::size_t k = 0; k < exprs.size(); ++k) xi[k] = exprs[k](t, u[k]);
    };
    return gen;
}

Row noether_row(const Context& ctx) {
    ProblemSpec spec = problem_spec(ctx);
    Field u(ctx.grid, ctx.cfg.problem.components);
    const Node un = ctx.problem.at("u");
    if (un.is_string() && un.string() == "random") {
        const Field base = spec.boundary ? *spec.boundary : Field(ctx.grid, ctx.cfg.problem.components);
        u = random_interior(ctx.grid, base, ctx.seed(), 1.0);
    } else if (un.is_string() && un.string() == "minimizer") {
        if (ctx.cfg.problem.components != 1) un.fail("the Dirichlet minimizer is a scalar field");
        bool converged = false;
        u = solve(ctx, dirichlet_spec(ctx), converged).u;
        if (!converged) un.fail("Dirichlet solve did not converge");
    } else {
        u = ctx.field("u");
    }
    const SymmetryGenerator gen = generator_from(ctx);
    const Field noe = noether_residual(spec, u, gen);
    const Field inv = invariance_residual(spec, u, gen);
    const Field el = el_residual(spec, u);
    const Field xi = sample_generator(gen, u);
    Field chain = noe - inv;
    for (int k = 0; k < u.components(); ++k) {
        for (std::size_t node = 0; node < ctx.grid.node_count(); ++node) chain[node] += xi(k, node) * el(k, node);
    }
    return {static_cast<double>(ctx.n), max_abs_interior(noe), max_abs_interior(inv), max_abs_interior(el),
            max_abs_interior(chain)};
}

// ---- wave-residual ----

const std::vector<std::string> kWaveColumns = {"n", "residual_max", "error_max"};

Row wave_row(const Context& ctx) {
    const auto& p = ctx.cfg.problem;
    const double rho = ctx.problem.number_or("rho", 1.0);
    const double stiffness = ctx.problem.number_or("stiffness", 1.0);
    const OperatorSpec time_op{p.psets1[0], p.alphas[0], p.kernels_alpha[0]};
    std::optional<std::vector<OperatorSpec>> space;
    const std::string mode = ctx.problem.string_or("space", "classical");
    if (mode == "fractional") {
        space.emplace();
        for (int i = 1; i < ctx.dims; ++i) space->push_back({p.psets1[i], p.alphas[i], p.kernels_alpha[i]});
    } else if (mode != "classical") {
        ctx.problem.at("space").fail("expected 'classical' or 'fractional'");
    }
    const Field u = ctx.field("u");
    const Field res = wave_residual(u, rho, stiffness, time_op, space);
    double err = kNaN;
    if (ctx.problem.has("exact")) {
        // Optional time window [t_lo, t_hi] keeps the comparison off the
        // singular ends of the time axis.
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        if (ctx.problem.has("window")) {
            lo = ctx.problem.at("window").at(0).number();
            hi = ctx.problem.at("window").at(1).number();
        }
        const Field exact = ctx.field("exact");
        err = 0.0;
        for (std::size_t node = 0; node < ctx.grid.node_count(); ++node) {
            if (ctx.grid.on_boundary(node)) continue;
            const double t = ctx.grid.axis(0).node(ctx.grid.index_along(node, 0));
            if (t < lo || t > hi) continue;
            err = std::max(err, std::abs(res[node] - exact[node]));
        }
    }
    return {static_cast<double>(ctx.n), max_abs_interior(res), err};
}

// ---- shared plumbing ----

void fill_order(std::vector<Row>& rows, std::size_t value_col, std::size_t order_col) {
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const double e0 = rows[r - 1][value_col];
        const double e1 = rows[r][value_col];
        const double ratio = rows[r][0] / rows[r - 1][0];
        rows[r][order_col] = (e0 > 0.0 && e1 > 0.0) ? std::log(e0 / e1) / std::log(ratio) : kNaN;
    }
}

Check make_check(const std::string& name, double value, double limit, const std::string& rel) {
    bool pass = false;
    if (rel == "<=") pass = value <= limit;
    if (rel == ">=") pass = value >= limit;
    if (rel == "==") pass = value == limit;
    return {name, value, limit, rel, pass};
}

void upper(std::vector<Check>& checks, const std::string& name, const std::optional<double>& limit, double value) {
    if (limit) checks.push_back(make_check(name, value, *limit, "<="));
}

// Residuals at the rounding floor count as converged.
bool decreasing(const std::vector<Row>& rows, std::size_t col, std::size_t scale_a, std::size_t scale_b) {
    for (std::size_t r = 1; r < rows.size(); ++r) {
        auto floor_of = [&](const Row& row) {
            return 1e-13 * std::max({1.0, std::abs(row[scale_a]), std::abs(row[scale_b])});
        };
        const bool both_floor = rows[r][col] <= floor_of(rows[r]) && rows[r - 1][col] <= floor_of(rows[r - 1]);
        if (!(rows[r][col] < rows[r - 1][col]) && !both_floor) return false;
    }
    return true;
}

template <typename Fn>
std::vector<Row> run_sweep(const ExperimentConfig& cfg, int jobs, Fn&& fn) {
    const std::size_t count = cfg.sweep.size();
    std::vector<Row> rows(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                rows[i] = fn(Context(cfg, cfg.sweep[i]));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int workers = std::clamp(jobs, 1, static_cast<int>(count));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return rows;
}

}  // namespace

bool Report::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Report execute(const ExperimentConfig& cfg, int jobs) {
    Report rep;
    const Tolerances& tol = cfg.tolerances;
    switch (cfg.command) {
        case Command::OpApply:
        case Command::ConvergenceSweep: {
            const bool sweep_mode = cfg.command == Command::ConvergenceSweep;
            const Node problem = Node(cfg.document, "").at("problem");
            if (sweep_mode && !problem.has("exact")) problem.fail("convergence-sweep needs an 'exact' expression");
            if (sweep_mode && cfg.sweep.size() < 2) throw ConfigError("sweep: convergence-sweep needs two or more sizes");
            rep.columns = kOpColumns;
            rep.rows = run_sweep(cfg, jobs, [](const Context& ctx) { return op_row(ctx, nullptr); });
            fill_order(rep.rows, 2, 3);
            const Row& last = rep.rows.back();
            upper(rep.checks, "error_max", tol.error_max, last[2]);
            if (rep.rows.size() >= 2) {
                const Row& first = rep.rows.front();
                const double overall = std::log(first[2] / last[2]) / std::log(last[0] / first[0]);
                rep.extra["order_overall"] = overall;
                if (tol.order_min) rep.checks.push_back(make_check("order_overall", overall, *tol.order_min, ">="));
                if (tol.order_max) rep.checks.push_back(make_check("order_overall", overall, *tol.order_max, "<="));
            }
            if (problem.has("field_output") && problem.at("field_output").boolean()) {
                Field out(make_grid(cfg.problem, cfg.sweep.back()), 1);
                op_row(Context(cfg, cfg.sweep.back()), &out);
                std::vector<std::string> cols;
                for (int i = 0; i < out.grid().dims(); ++i) cols.push_back("t" + std::to_string(i + 1));
                cols.push_back("value");
                std::vector<Row> rows;
                for (std::size_t node = 0; node < out.node_count(); ++node) {
                    Row r = out.grid().coords(node);
                    r.push_back(out[node]);
                    rows.push_back(std::move(r));
                }
                rep.field.emplace(std::move(cols), std::move(rows));
            }
            break;
        }
        case Command::IbpCheck: {
            rep.columns = kIbpColumns;
            rep.rows = run_sweep(cfg, jobs, ibp_row);
            fill_order(rep.rows, 4, 6);
            upper(rep.checks, "residual_abs", tol.residual_max, rep.rows.back()[4]);
            if (tol.decreasing) {
                rep.checks.push_back(make_check("residual_decreasing", decreasing(rep.rows, 4, 1, 2) ? 1 : 0, 1, "=="));
            }
            break;
        }
        case Command::ElResidual: {
            rep.columns = kElColumns;
            rep.rows = run_sweep(cfg, jobs, el_row);
            upper(rep.checks, "residual_max", tol.residual_max, rep.rows.back()[2]);
            break;
        }
        case Command::DirichletSolve: {
            rep.columns = kDirichletColumns;
            rep.rows = run_sweep(cfg, jobs, dirichlet_row);
            for (const Row& r : rep.rows) {
                rep.checks.push_back(make_check("converged_n" + std::to_string(static_cast<int>(r[0])), r[5], 1, "=="));
            }
            upper(rep.checks, "energy", tol.energy_max, rep.rows.back()[1]);
            upper(rep.checks, "gradient_norm", tol.gradient_max, rep.rows.back()[3]);
            upper(rep.checks, "bvp_residual_max", tol.bvp_max, rep.rows.back()[4]);
            break;
        }
        case Command::NoetherCheck: {
            rep.columns = kNoetherColumns;
            rep.rows = run_sweep(cfg, jobs, noether_row);
            upper(rep.checks, "chain_max", tol.chain_max, rep.rows.back()[4]);
            upper(rep.checks, "noether_max", tol.noether_max, rep.rows.back()[1]);
            break;
        }
        case Command::WaveResidual: {
            rep.columns = kWaveColumns;
            rep.rows = run_sweep(cfg, jobs, wave_row);
            upper(rep.checks, "residual_max", tol.residual_max, rep.rows.back()[1]);
            upper(rep.checks, "error_max", tol.error_max, rep.rows.back()[2]);
            break;
        }
    }
    return rep;
}

}  // namespace fracvar::cli
