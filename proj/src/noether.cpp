#include "fracvar/noether.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fracvar/errors.hpp"
#include "fracvar/frac_ops.hpp"

namespace fracvar {

namespace {

void require_fractional(const ProblemSpec& spec, const char* where) {
    if (spec.third_block != ThirdBlock::FractionalIntegral) {
        throw DomainError(std::string(where) + ": needs a fractional-integral third block");
    }
}

void require_scalars(const Field& f, const Field& g, const char* where) {
    require_same_grid(f, g, where);
    if (f.components() != 1 || g.components() != 1) {
        throw LengthMismatch(std::string(where) + ": scalar fields expected");
    }
}

}  // namespace

SymmetryGenerator SymmetryGenerator::zero() {
    return {[](std::span<const double>, std::span<const double>, std::span<double> xi) {
                std::fill(xi.begin(), xi.end(), 0.0);
            },
            "zero"};
}

SymmetryGenerator SymmetryGenerator::translation(std::span<const double> c) {
    std::vector<double> shift(c.begin(), c.end());
    return {[shift](std::span<const double>, std::span<const double> u, std::span<double> xi) {
                if (u.size() != shift.size()) throw LengthMismatch("translation generator: component count");
                std::copy(shift.begin(), shift.end(), xi.begin());
            },
            "translation"};
}

SymmetryGenerator SymmetryGenerator::scaling() {
    return {[](std::span<const double>, std::span<const double> u, std::span<double> xi) {
                std::copy(u.begin(), u.end(), xi.begin());
            },
            "scaling"};
}

Field sample_generator(const SymmetryGenerator& gen, const Field& u) {
    const auto& grid = u.grid();
    const int N = u.components();
    Field xi(grid, N);
    std::vector<double> t(grid.dims()), uu(N), out(N);
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
        grid.coords(node, t);
        for (int k = 0; k < N; ++k) uu[k] = u(k, node);
        gen.xi(t, uu, out);
        for (int k = 0; k < N; ++k) xi(k, node) = out[k];
    }
    if (!xi.all_finite()) throw EvalError("symmetry generator produced non-finite values");
    return xi;
}

bool is_smooth(const Field& xi, double rel_bound) {
    const double scale = 1.0 + max_abs(xi);
    for (int i = 0; i < xi.grid().dims(); ++i) {
        if (xi.grid().extent(i) < 4) continue;
        const double h = xi.grid().axis(i).h();
        if (h * h * max_abs(second_difference(xi, i)) > rel_bound * scale) return false;
    }
    return true;
}

Field invariance_residual(const ProblemSpec& spec, const Field& u, const SymmetryGenerator& gen) {
    require_fractional(spec, "invariance_residual");
    const PartialFields pf = partial_fields(spec, u);
    const Field xi = sample_generator(gen, u);
    const int n = spec.grid.dims();
    const int N = u.components();
    Field res(spec.grid, 1);
    for (int i = 0; i < n; ++i) {
        const Field bxi = apply_partial(OpKind::B, spec.alphas[i], spec.psets1[i], spec.kernels_alpha[i], xi, i);
        const Field kxi = apply_partial(OpKind::K, spec.betas[i], spec.psets2[i], spec.kernels_beta[i], xi, i);
        for (int k = 0; k < N; ++k) {
            const Field& dv = pf.dv[k * n + i];
            const Field& dw = pf.dw[k * n + i];
            for (std::size_t node = 0; node < spec.grid.node_count(); ++node) {
                res[node] += dv[node] * bxi(k, node) + dw[node] * kxi(k, node);
            }
        }
    }
    for (int k = 0; k < N; ++k) {
        for (std::size_t node = 0; node < spec.grid.node_count(); ++node) res[node] += pf.du(k, node) * xi(k, node);
    }
    for (int i = 0; i < n; ++i) res.flag_axis(i);
    return res;
}

Field bracket_D(const Field& f, const Field& g, const ParamSet& pset, double order, const KernelSpec& kernel,
                int axis) {
    require_scalars(f, g, "bracket_D");
    const Field ag = apply_partial(OpKind::A, order, dual(pset), kernel, g, axis);
    const Field bf = apply_partial(OpKind::B, order, pset, kernel, f, axis);
    return hadamard(f, ag) + hadamard(g, bf);
}

Field bracket_I(const Field& f, const Field& g, const ParamSet& pset, double order, const KernelSpec& kernel,
                int axis) {
    require_scalars(f, g, "bracket_I");
    const Field kg = apply_partial(OpKind::K, order, dual(pset), kernel, g, axis);
    const Field kf = apply_partial(OpKind::K, order, pset, kernel, f, axis);
    return hadamard(g, kf) - hadamard(f, kg);
}

Field noether_residual(const ProblemSpec& spec, const Field& u, const SymmetryGenerator& gen) {
    require_fractional(spec, "noether_residual");
    const PartialFields pf = partial_fields(spec, u);
    const Field xi = sample_generator(gen, u);
    const int n = spec.grid.dims();
    const int N = u.components();
    Field res(spec.grid, 1);
    for (int k = 0; k < N; ++k) {
        const Field xk = xi.extract(k);
        for (int i = 0; i < n; ++i) {
            res += bracket_D(xk, pf.dv[k * n + i], spec.psets1[i], spec.alphas[i], spec.kernels_alpha[i], i);
            res += bracket_I(xk, pf.dw[k * n + i], spec.psets2[i], spec.betas[i], spec.kernels_beta[i], i);
        }
    }
    for (int i = 0; i < n; ++i) res.flag_axis(i);
    return res;
}

}  // namespace fracvar
