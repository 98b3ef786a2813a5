#include "fracvar/variational.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fracvar/errors.hpp"
#include "fracvar/ibp_verify.hpp"

namespace fracvar {

Lagrangian::Lagrangian(std::string name, int n, int N, Eval eval, Gradient gradient, ThirdBlock preferred)
    : name_(std::move(name)),
      n_(n),
      N_(N),
      eval_(std::move(eval)),
      gradient_(std::move(gradient)),
      preferred_(preferred) {
    if (n < 1 || N < 1) {
        throw DomainError("Lagrangian: need n >= 1 and N >= 1");
    }
    if (!eval_ || !gradient_) {
        throw DomainError("Lagrangian: eval and gradient callbacks are required");
    }
}

GradientCheckReport validate_lagrangian(const Lagrangian& lag, std::uint64_t seed, int trials, double rel_tol) {
    const int n = lag.n();
    const int N = lag.N();
    const std::size_t nb = static_cast<std::size_t>(n) * N;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> t(n), u(N), v(nb), w(nb);
    std::vector<double> du(N), dv(nb), dw(nb);
    GradientCheckReport report;
    report.trials = trials;
    auto eval_at = [&]() { return lag(LagrangianPoint{t, u, v, w}); };
    auto probe = [&](std::vector<double>& slot, const std::vector<double>& analytic, const char* block) {
        for (std::size_t j = 0; j < slot.size(); ++j) {
            const double x0 = slot[j];
            const double step = 1e-5 * std::max(1.0, std::abs(x0));
            slot[j] = x0 + step;
            const double fp = eval_at();
            slot[j] = x0 - step;
            const double fm = eval_at();
            slot[j] = x0;
            const double fd = (fp - fm) / (2.0 * step);
            const double err = std::abs(analytic[j] - fd) / std::max({1.0, std::abs(analytic[j]), std::abs(fd)});
            report.max_error = std::max(report.max_error, err);
            if (!(err <= rel_tol)) {
                throw DomainError("Lagrangian '" + lag.name() + "': partial dF/d" + block + "[" +
                                  std::to_string(j) + "] disagrees with finite differences");
            }
        }
    };
    for (int trial = 0; trial < trials; ++trial) {
        for (double& x : t) x = 0.5 * (dist(rng) + 1.0);
        for (double& x : u) x = dist(rng);
        for (double& x : v) x = dist(rng);
        for (double& x : w) x = dist(rng);
        lag.gradient(LagrangianPoint{t, u, v, w}, du, dv, dw);
        probe(u, du, "u");
        probe(v, dv, "v");
        probe(w, dw, "w");
    }
    return report;
}

Lagrangian operator+(const Lagrangian& lhs, const Lagrangian& rhs) {
    if (lhs.n() != rhs.n() || lhs.N() != rhs.N()) {
        throw LengthMismatch("Lagrangian sum: shapes differ");
    }
    const std::size_t nb = static_cast<std::size_t>(lhs.n()) * lhs.N();
    const std::size_t N = static_cast<std::size_t>(lhs.N());
    auto eval = [lhs, rhs](const LagrangianPoint& pt) { return lhs(pt) + rhs(pt); };
    auto grad = [lhs, rhs, nb, N](const LagrangianPoint& pt, std::span<double> du, std::span<double> dv,
                                  std::span<double> dw) {
        std::vector<double> buf(N + 2 * nb);
        std::span<double> du2(buf.data(), N);
        std::span<double> dv2(buf.data() + N, nb);
        std::span<double> dw2(buf.data() + N + nb, nb);
        lhs.gradient(pt, du, dv, dw);
        rhs.gradient(pt, du2, dv2, dw2);
        for (std::size_t j = 0; j < N; ++j) du[j] += du2[j];
        for (std::size_t j = 0; j < nb; ++j) {
            dv[j] += dv2[j];
            dw[j] += dw2[j];
        }
    };
    return Lagrangian(lhs.name() + "+" + rhs.name(), lhs.n(), lhs.N(), eval, grad, lhs.preferred_block());
}

ProblemSpec make_problem(const GridND& grid, const Lagrangian& lag, const ParamSet& pset, double order,
                         const KernelSpec& kernel) {
    const auto n = static_cast<std::size_t>(grid.dims());
    std::vector<ParamSet> psets;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& ax = grid.axis(static_cast<int>(i));
        psets.emplace_back(ax.a(), ax.b(), pset.p, pset.q);
    }
    return ProblemSpec{grid,
                       lag,
                       psets,
                       psets,
                       std::vector<double>(n, order),
                       std::vector<double>(n, order),
                       std::vector<KernelSpec>(n, kernel),
                       std::vector<KernelSpec>(n, kernel),
                       lag.preferred_block(),
                       std::nullopt,
                       1e-12};
}

void validate(const ProblemSpec& spec) {
    const auto n = static_cast<std::size_t>(spec.grid.dims());
    if (spec.lagrangian.n() != spec.grid.dims()) {
        throw LengthMismatch("ProblemSpec: Lagrangian expects " + std::to_string(spec.lagrangian.n()) +
                             " independent variables, grid has " + std::to_string(spec.grid.dims()));
    }
    if (spec.psets1.size() != n || spec.psets2.size() != n || spec.alphas.size() != n ||
        spec.betas.size() != n || spec.kernels_alpha.size() != n || spec.kernels_beta.size() != n) {
        throw LengthMismatch("ProblemSpec: p-sets, orders and kernels must have one entry per axis");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(spec.alphas[i] > 0.0 && spec.alphas[i] < 1.0)) throw OrderError("ProblemSpec: alpha outside (0, 1)");
        if (!(spec.betas[i] > 0.0 && spec.betas[i] <= 1.0)) throw OrderError("ProblemSpec: beta outside (0, 1]");
    }
    if (spec.boundary) {
        if (!(spec.boundary->grid() == spec.grid)) throw GridMismatch("ProblemSpec: boundary data on another grid");
        if (spec.boundary->components() != spec.lagrangian.N()) {
            throw LengthMismatch("ProblemSpec: boundary data has the wrong number of components");
        }
    }
}

void check_admissible(const ProblemSpec& spec, const Field& u) {
    if (!(u.grid() == spec.grid)) throw GridMismatch("field is not on the problem grid");
    if (u.components() != spec.lagrangian.N()) {
        throw LengthMismatch("field has " + std::to_string(u.components()) + " components, Lagrangian expects " +
                             std::to_string(spec.lagrangian.N()));
    }
    if (!spec.boundary) return;
    const auto& psi = *spec.boundary;
    for (std::size_t node = 0; node < spec.grid.node_count(); ++node) {
        if (!spec.grid.on_boundary(node)) continue;
        for (int k = 0; k < u.components(); ++k) {
            if (std::abs(u(k, node) - psi(k, node)) > spec.boundary_tol) {
                throw BoundaryViolation("field departs from the boundary data at node " + std::to_string(node));
            }
        }
    }
}

ArgumentBlocks argument_blocks(const ProblemSpec& spec, const Field& u) {
    ArgumentBlocks blocks;
    for (int i = 0; i < spec.grid.dims(); ++i) {
        blocks.v.push_back(apply_partial(OpKind::B, spec.alphas[i], spec.psets1[i], spec.kernels_alpha[i], u, i));
        if (spec.third_block == ThirdBlock::FractionalIntegral) {
            blocks.w.push_back(apply_partial(OpKind::K, spec.betas[i], spec.psets2[i], spec.kernels_beta[i], u, i));
        } else {
            blocks.w.push_back(finite_difference(u, i));
        }
    }
    return blocks;
}

namespace {

// Calls fn(node, point) with the arguments of F at every node.
template <typename Fn>
void for_each_point(const ProblemSpec& spec, const Field& u, const ArgumentBlocks& blocks, Fn&& fn) {
    const int n = spec.grid.dims();
    const int N = u.components();
    const auto nb = static_cast<std::size_t>(n) * N;
    const auto count = static_cast<long long>(spec.grid.node_count());
#pragma omp parallel
    {
        std::vector<double> t(n), uu(N), v(nb), w(nb);
#pragma omp for schedule(static)
        for (long long s = 0; s < count; ++s) {
            const auto node = static_cast<std::size_t>(s);
            spec.grid.coords(node, t);
            for (int k = 0; k < N; ++k) {
                uu[k] = u(k, node);
                for (int i = 0; i < n; ++i) {
                    v[k * n + i] = blocks.v[i](k, node);
                    w[k * n + i] = blocks.w[i](k, node);
                }
            }
            fn(node, LagrangianPoint{t, uu, v, w});
        }
    }
}

void flag_all(Field& f) {
    for (int i = 0; i < f.grid().dims(); ++i) f.flag_axis(i);
}

// Gathers dF/dv[k][i] (or dw) over k into one N-component field for axis i.
Field axis_block(const std::vector<Field>& partials, int n, int N, int i) {
    Field out(partials.front().grid(), N);
    for (int k = 0; k < N; ++k) {
        auto src = partials[k * n + i].component(0);
        std::copy(src.begin(), src.end(), out.component(k).begin());
    }
    return out;
}

}  // namespace

PartialFields partial_fields(const ProblemSpec& spec, const Field& u) {
    validate(spec);
    check_admissible(spec, u);
    const int n = spec.grid.dims();
    const int N = u.components();
    const auto nb = static_cast<std::size_t>(n) * N;
    const ArgumentBlocks blocks = argument_blocks(spec, u);
    PartialFields out{Field(spec.grid, N), {}, {}};
    out.dv.assign(nb, Field(spec.grid, 1));
    out.dw.assign(nb, Field(spec.grid, 1));
    const Lagrangian& lag = spec.lagrangian;
#pragma omp parallel
    {
        std::vector<double> du(N), dv(nb), dw(nb);
        std::vector<double> t(n), uu(N), v(nb), w(nb);
        const auto count = static_cast<long long>(spec.grid.node_count());
#pragma omp for schedule(static)
        for (long long s = 0; s < count; ++s) {
            const auto node = static_cast<std::size_t>(s);
            spec.grid.coords(node, t);
            for (int k = 0; k < N; ++k) {
                uu[k] = u(k, node);
                for (int i = 0; i < n; ++i) {
                    v[k * n + i] = blocks.v[i](k, node);
                    w[k * n + i] = blocks.w[i](k, node);
                }
            }
            lag.gradient(LagrangianPoint{t, uu, v, w}, du, dv, dw);
            for (int k = 0; k < N; ++k) out.du(k, node) = du[k];
            for (std::size_t j = 0; j < nb; ++j) {
                out.dv[j][node] = dv[j];
                out.dw[j][node] = dw[j];
            }
        }
    }
    return out;
}

double evaluate_functional(const ProblemSpec& spec, const Field& u) {
    validate(spec);
    check_admissible(spec, u);
    const ArgumentBlocks blocks = argument_blocks(spec, u);
    Field integrand(spec.grid, 1);
    for_each_point(spec, u, blocks,
                   [&](std::size_t node, const LagrangianPoint& pt) { integrand[node] = spec.lagrangian(pt); });
    return volume_integral(integrand);
}

Field el_residual(const ProblemSpec& spec, const Field& u) {
    if (spec.third_block != ThirdBlock::FractionalIntegral) {
        throw DomainError("el_residual: needs a fractional-integral third block; use el_residual_mixed");
    }
    const PartialFields pf = partial_fields(spec, u);
    const int n = spec.grid.dims();
    const int N = u.components();
    Field res = pf.du;
    for (int i = 0; i < n; ++i) {
        res -= apply_partial(OpKind::A, spec.alphas[i], dual(spec.psets1[i]), spec.kernels_alpha[i],
                             axis_block(pf.dv, n, N, i), i);
        res += apply_partial(OpKind::K, spec.betas[i], dual(spec.psets2[i]), spec.kernels_beta[i],
                             axis_block(pf.dw, n, N, i), i);
    }
    flag_all(res);
    return res;
}

Field el_residual_mixed(const ProblemSpec& spec, const Field& u) {
    if (spec.third_block != ThirdBlock::ClassicalGradient) {
        throw DomainError("el_residual_mixed: needs a classical-gradient third block");
    }
    const PartialFields pf = partial_fields(spec, u);
    const int n = spec.grid.dims();
    const int N = u.components();
    Field res = -1.0 * pf.du;
    for (int i = 0; i < n; ++i) {
        res += apply_partial(OpKind::A, spec.alphas[i], dual(spec.psets1[i]), spec.kernels_alpha[i],
                             axis_block(pf.dv, n, N, i), i);
        res += finite_difference(axis_block(pf.dw, n, N, i), i);
    }
    flag_all(res);
    return res;
}

Field wave_residual(const Field& u, double rho, double stiffness, const OperatorSpec& time_op,
                    const std::optional<std::vector<OperatorSpec>>& space_ops) {
    if (!(rho > 0.0) || !(stiffness > 0.0)) {
        throw DomainError("wave_residual: rho and stiffness must be positive");
    }
    const int dims = u.grid().dims();
    if (dims < 1 || dims > 3) {
        throw DomainError("wave_residual: grid must have one time axis and at most two space axes");
    }
    if (space_ops && static_cast<int>(space_ops->size()) != dims - 1) {
        throw LengthMismatch("wave_residual: need one space operator per space axis");
    }
    const Field bt = apply_partial(OpKind::B, time_op.order, time_op.pset, time_op.kernel, u, 0);
    Field res = rho * apply_partial(OpKind::A, time_op.order, dual(time_op.pset), time_op.kernel, bt, 0);
    for (int i = 1; i < dims; ++i) {
        if (space_ops) {
            const auto& op = (*space_ops)[i - 1];
            const Field bx = stiffness * apply_partial(OpKind::B, op.order, op.pset, op.kernel, u, i);
            res -= apply_partial(OpKind::A, op.order, dual(op.pset), op.kernel, bx, i);
        } else {
            res -= stiffness * second_difference(u, i);
        }
    }
    flag_all(res);
    return res;
}

}  // namespace fracvar
