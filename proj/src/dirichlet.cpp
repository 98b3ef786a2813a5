#include "fracvar/dirichlet.hpp"

#include <algorithm>
#include <cmath>

#include "fracvar/frac_ops.hpp"

namespace fracvar {

namespace {

struct Plans {
    std::vector<FracOpPlan> b;
    std::vector<FracOpPlan> a_dual;
};

Plans build_plans(const DirichletSpec& spec, bool with_a) {
    Plans plans;
    for (int i = 0; i < spec.grid.dims(); ++i) {
        const auto& ax = spec.grid.axis(i);
        plans.b.emplace_back(OpKind::B, spec.alphas[i], spec.psets[i], spec.kernels[i], ax, i);
        if (with_a) plans.a_dual.emplace_back(OpKind::A, spec.alphas[i], dual(spec.psets[i]), spec.kernels[i], ax, i);
    }
    return plans;
}

void check_admissible(const DirichletSpec& spec, const Field& u) {
    if (!(u.grid() == spec.grid)) throw GridMismatch("field is not on the Dirichlet grid");
    if (u.components() != 1) throw LengthMismatch("Dirichlet fields are scalar");
    for (std::size_t node = 0; node < spec.grid.node_count(); ++node) {
        if (spec.grid.on_boundary(node) && std::abs(u[node] - spec.boundary[node]) > spec.boundary_tol) {
            throw BoundaryViolation("field departs from the boundary data at node " + std::to_string(node));
        }
    }
}

double weighted_squares(const GridND& grid, const std::vector<Field>& bu) {
    double acc = 0.0;
    for (const Field& f : bu) {
        for (std::size_t node = 0; node < grid.node_count(); ++node) acc += grid.weight(node) * f[node] * f[node];
    }
    return acc;
}

// Euclidean gradient 2 sum_i B_i^T W (B_i u), restricted to interior nodes.
Field euclidean_gradient(const GridND& grid, const Plans& plans, const std::vector<Field>& bu) {
    Field g(grid, 1);
    for (std::size_t i = 0; i < plans.b.size(); ++i) {
        Field wz = bu[i];
        for (std::size_t node = 0; node < grid.node_count(); ++node) wz[node] *= grid.weight(node);
        g += apply_op_nd_transpose(plans.b[i], wz);
    }
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
        g[node] = grid.on_boundary(node) ? 0.0 : 2.0 * g[node];
    }
    return g;
}

std::vector<Field> apply_all(const Plans& plans, const Field& u) {
    std::vector<Field> out;
    out.reserve(plans.b.size());
    for (const auto& plan : plans.b) out.push_back(apply_op_nd(plan, u));
    return out;
}

// L2 gradient norm: max |g_m| / W_m over interior nodes.
double l2_gradient_norm(const GridND& grid, const Field& euclid) {
    double m = 0.0;
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
        if (!grid.on_boundary(node)) m = std::max(m, std::abs(euclid[node]) / grid.weight(node));
    }
    return m;
}

// Diagonal of the Hessian 2 sum_i B_i^T W B_i.
Field hessian_diagonal(const GridND& grid, const Plans& plans) {
    const int dims = grid.dims();
    std::vector<std::vector<double>> col_norms(dims);
    for (int i = 0; i < dims; ++i) {
        const auto& ax = grid.axis(i);
        const std::size_t np = ax.size();
        const std::vector<double> mat = plans.b[i].dense_matrix();
        col_norms[i].assign(np, 0.0);
        for (std::size_t j = 0; j < np; ++j) {
            for (std::size_t m = 0; m < np; ++m) col_norms[i][m] += ax.weight(j) * mat[j * np + m] * mat[j * np + m];
        }
    }
    Field diag(grid, 1);
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
        double acc = 0.0;
        for (int i = 0; i < dims; ++i) {
            double w = col_norms[i][grid.index_along(node, i)];
            for (int k = 0; k < dims; ++k) {
                if (k != i) w *= grid.axis(k).weight(grid.index_along(node, k));
            }
            acc += w;
        }
        diag[node] = 2.0 * acc;
    }
    return diag;
}

double dot_interior(const GridND& grid, const Field& x, const Field& y) {
    double acc = 0.0;
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
        if (!grid.on_boundary(node)) acc += x[node] * y[node];
    }
    return acc;
}

}  // namespace

DirichletSpec make_dirichlet(const GridND& grid, const ParamSet& pset, double order, const KernelSpec& kernel,
                             Field boundary) {
    const auto n = static_cast<std::size_t>(grid.dims());
    std::vector<ParamSet> psets;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& ax = grid.axis(static_cast<int>(i));
        psets.emplace_back(ax.a(), ax.b(), pset.p, pset.q);
    }
    return DirichletSpec{grid,         psets, std::vector<double>(n, order), std::vector<KernelSpec>(n, kernel),
                         std::move(boundary)};
}

void validate(const DirichletSpec& spec) {
    const auto n = static_cast<std::size_t>(spec.grid.dims());
    if (spec.psets.size() != n || spec.alphas.size() != n || spec.kernels.size() != n) {
        throw LengthMismatch("DirichletSpec: p-sets, orders and kernels must have one entry per axis");
    }
    if (!(spec.boundary.grid() == spec.grid)) throw GridMismatch("DirichletSpec: boundary data on another grid");
    if (spec.boundary.components() != 1) throw LengthMismatch("DirichletSpec: boundary data must be scalar");
    if (!(spec.tol > 0.0)) throw DomainError("DirichletSpec: tol must be positive");
    if (spec.max_iter < 0) throw DomainError("DirichletSpec: max_iter must be non-negative");
}

double energy(const DirichletSpec& spec, const Field& u) {
    validate(spec);
    check_admissible(spec, u);
    return weighted_squares(spec.grid, apply_all(build_plans(spec, false), u));
}

Field bvp_residual(const DirichletSpec& spec, const Field& u) {
    validate(spec);
    require_same_grid(spec.boundary, u, "bvp_residual");
    const Plans plans = build_plans(spec, true);
    Field res(spec.grid, 1);
    for (std::size_t i = 0; i < plans.b.size(); ++i) res += apply_op_nd(plans.a_dual[i], apply_op_nd(plans.b[i], u));
    for (int i = 0; i < spec.grid.dims(); ++i) res.flag_axis(i);
    return res;
}

Field energy_gradient(const DirichletSpec& spec, const Field& u) {
    validate(spec);
    require_same_grid(spec.boundary, u, "energy_gradient");
    const Plans plans = build_plans(spec, false);
    Field g = euclidean_gradient(spec.grid, plans, apply_all(plans, u));
    for (std::size_t node = 0; node < spec.grid.node_count(); ++node) {
        if (!spec.grid.on_boundary(node)) g[node] /= spec.grid.weight(node);
    }
    return g;
}

Field default_init(const DirichletSpec& spec) {
    validate(spec);
    const auto& grid = spec.grid;
    const int dims = grid.dims();
    std::vector<std::size_t> corners(std::size_t{1} << dims);
    for (std::size_t c = 0; c < corners.size(); ++c) {
        std::size_t node = 0;
        for (int i = 0; i < dims; ++i) {
            if (c & (std::size_t{1} << i)) node += (grid.extent(i) - 1) * grid.stride(i);
        }
        corners[c] = node;
    }
    Field u(grid, 1);
    std::vector<double> s(dims);
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
        if (grid.on_boundary(node)) {
            u[node] = spec.boundary[node];
            continue;
        }
        for (int i = 0; i < dims; ++i) {
            const auto& ax = grid.axis(i);
            s[i] = static_cast<double>(grid.index_along(node, i)) / ax.cells();
        }
        double acc = 0.0;
        for (std::size_t c = 0; c < corners.size(); ++c) {
            double w = 1.0;
            for (int i = 0; i < dims; ++i) w *= (c & (std::size_t{1} << i)) ? s[i] : 1.0 - s[i];
            acc += w * spec.boundary[corners[c]];
        }
        u[node] = acc;
    }
    return u;
}

MinimizeResult minimize_energy(const DirichletSpec& spec, const std::optional<Field>& init) {
    validate(spec);
    const GridND& grid = spec.grid;
    Field u = init ? *init : default_init(spec);
    check_admissible(spec, u);

    std::size_t unknowns = 0;
    for (std::size_t node = 0; node < grid.node_count(); ++node) unknowns += grid.on_boundary(node) ? 0 : 1;
    const int max_iter = spec.max_iter > 0 ? spec.max_iter : static_cast<int>(10 * std::max<std::size_t>(unknowns, 1));

    const Plans plans = build_plans(spec, false);
    std::vector<Field> bu = apply_all(plans, u);

    MinimizeResult result{u, 0, 0.0, weighted_squares(grid, bu), {}, {}};
    result.energy_history.push_back(result.energy);

    const bool degenerate = std::all_of(spec.psets.begin(), spec.psets.end(),
                                        [](const ParamSet& p) { return p.p == 0.0 && p.q == 0.0; });
    if (degenerate) {
        result.warnings.push_back("DegenerateEnergy");
        return result;
    }

    Field diag = hessian_diagonal(grid, plans);
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
        if (grid.on_boundary(node) || !(diag[node] > 0.0)) diag[node] = 1.0;
    }

    Field r = -1.0 * euclidean_gradient(grid, plans, bu);
    result.gradient_norm = l2_gradient_norm(grid, r);
    Field best_u = u;
    double best_norm = result.gradient_norm;
    auto fail = [&](int reported) {
        MinimizeResult best = result;
        best.u = best_u;
        best.gradient_norm = best_norm;
        return NoConvergence(reported, std::move(best));
    };

    Field z = r;
    for (std::size_t node = 0; node < grid.node_count(); ++node) z[node] /= diag[node];
    Field p = z;
    double rz = dot_interior(grid, r, z);

    int iter = 0;
    while (result.gradient_norm > spec.tol) {
        if (iter >= max_iter) throw fail(max_iter);
        const std::vector<Field> bp = apply_all(plans, p);
        const Field hp = euclidean_gradient(grid, plans, bp);
        const double php = dot_interior(grid, p, hp);
        if (!(php > 0.0) || !std::isfinite(php)) throw fail(iter);
        const double step = rz / php;
        ++iter;
        for (std::size_t node = 0; node < grid.node_count(); ++node) {
            u[node] += step * p[node];
            r[node] -= step * hp[node];
        }
        for (std::size_t i = 0; i < bu.size(); ++i) {
            for (std::size_t node = 0; node < grid.node_count(); ++node) bu[i][node] += step * bp[i][node];
        }
        double norm = l2_gradient_norm(grid, r);
        if (norm <= spec.tol) {
            // Confirm against the true gradient; restart the recursion from it.
            bu = apply_all(plans, u);
            r = -1.0 * euclidean_gradient(grid, plans, bu);
            norm = l2_gradient_norm(grid, r);
        }
        result.u = u;
        result.iterations = iter;
        result.gradient_norm = norm;
        result.energy = weighted_squares(grid, bu);
        result.energy_history.push_back(result.energy);
        if (norm < best_norm) {
            best_u = u;
            best_norm = norm;
        }

        for (std::size_t node = 0; node < grid.node_count(); ++node) z[node] = r[node] / diag[node];
        const double rz_new = dot_interior(grid, r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t node = 0; node < grid.node_count(); ++node) {
            p[node] = grid.on_boundary(node) ? 0.0 : z[node] + beta * p[node];
        }
    }
    return result;
}

double uniqueness_check(const DirichletSpec& spec, const Field& init1, const Field& init2) {
    const MinimizeResult r1 = minimize_energy(spec, init1);
    const MinimizeResult r2 = minimize_energy(spec, init2);
    return max_abs(r1.u - r2.u);
}

}  // namespace fracvar
