#include "fracvar/ibp_verify.hpp"

#include <algorithm>
#include <cmath>

#include "fracvar/errors.hpp"
#include "fracvar/frac_ops.hpp"

namespace fracvar {

namespace {

void require_scalar(const Field& f, const char* where) {
    if (f.components() != 1) {
        throw LengthMismatch(std::string(where) + ": single-component field expected");
    }
}

IbpReport finish(double lhs, double rhs, double boundary, const Field& f, int axis, const KernelSpec& kernel) {
    IbpReport r;
    r.lhs = lhs;
    r.rhs = rhs;
    r.boundary_term = boundary;
    r.residual = std::abs(lhs - rhs);
    r.residual_rel = r.residual / std::max({std::abs(lhs), std::abs(rhs), 1e-14});
    r.grid_n = f.grid().axis(axis).cells();
    r.unverified_hypotheses = kernel.family() == KernelFamily::Tabulated;
    return r;
}

}  // namespace

double volume_integral(const Field& f) {
    require_scalar(f, "volume_integral");
    const auto& grid = f.grid();
    double acc = 0.0;
    for (std::size_t node = 0; node < grid.node_count(); ++node) acc += grid.weight(node) * f[node];
    return acc;
}

double boundary_integral(const Field& g, int axis) {
    require_scalar(g, "boundary_integral");
    const auto& grid = g.grid();
    const auto& ax = grid.axis(axis);
    const std::size_t last = ax.size() - 1;
    double acc = 0.0;
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
        const std::size_t j = grid.index_along(node, axis);
        if (j != 0 && j != last) continue;
        // Face weight: trapezoid weights of the remaining axes.
        double w = 1.0;
        for (int k = 0; k < grid.dims(); ++k) {
            if (k != axis) w *= grid.axis(k).weight(grid.index_along(node, k));
        }
        acc += (j == last ? w : -w) * g[node];
    }
    return acc;
}

IbpReport check_K_duality(const Field& f, const Field& eta, const ParamSet& pset, double order,
                          const KernelSpec& kernel, int axis) {
    require_same_grid(f, eta, "check_K_duality");
    require_scalar(f, "check_K_duality");
    require_scalar(eta, "check_K_duality");
    const auto& ax = f.grid().axis(axis);
    const FracOpPlan k_p(OpKind::K, order, pset, kernel, ax, axis);
    const FracOpPlan k_dual(OpKind::K, order, dual(pset), kernel, ax, axis);
    const double lhs = volume_integral(hadamard(f, apply_op_nd(k_p, eta)));
    const double rhs = volume_integral(hadamard(eta, apply_op_nd(k_dual, f)));
    return finish(lhs, rhs, 0.0, f, axis, kernel);
}

IbpReport check_ibp(const Field& f, const Field& eta, const ParamSet& pset, double order,
                    const KernelSpec& kernel, int axis) {
    require_same_grid(f, eta, "check_ibp");
    require_scalar(f, "check_ibp");
    require_scalar(eta, "check_ibp");
    if (!(order > 0.0 && order < 1.0)) {
        throw OrderError("check_ibp: order must lie in (0, 1)");
    }
    const auto& ax = f.grid().axis(axis);
    const ParamSet pd = dual(pset);
    const FracOpPlan b_p(OpKind::B, order, pset, kernel, ax, axis);
    const FracOpPlan a_dual(OpKind::A, order, pd, kernel, ax, axis);
    const FracOpPlan k_dual(OpKind::K, 1.0 - order, pd, kernel, ax, axis);
    const double lhs = volume_integral(hadamard(f, apply_op_nd(b_p, eta)));
    const double boundary = boundary_integral(hadamard(eta, apply_op_nd(k_dual, f)), axis);
    const double rhs = boundary - volume_integral(hadamard(eta, apply_op_nd(a_dual, f)));
    return finish(lhs, rhs, boundary, f, axis, kernel);
}

}  // namespace fracvar
