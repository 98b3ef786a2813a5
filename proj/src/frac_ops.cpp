#include "fracvar/frac_ops.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "fracvar/errors.hpp"
#include "fracvar/line_kernels.hpp"
#include "fracvar/special.hpp"

namespace fracvar {

namespace {

// 8-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 8> kGaussX = {
    0.019855071751231856, 0.10166676129318664, 0.2372337950418355, 0.4082826787521751,
    0.5917173212478249,   0.7627662049581645,  0.8983332387068134, 0.9801449282487681,
};
constexpr std::array<double, 8> kGaussW = {
    0.050614268145188129, 0.11119051722668724, 0.15685332293894364, 0.18134189168918099,
    0.18134189168918099,  0.15685332293894364, 0.11119051722668724, 0.050614268145188129,
};

// (d+1)^g - d^g without cancellation for large d.
long double power_step(long double d, long double g) {
    if (d == 0.0L) return 1.0L;
    return std::pow(d, g) * std::expm1(g * std::log1p(1.0L / d));
}

}  // namespace

std::string to_string(OpKind kind) {
    switch (kind) {
        case OpKind::K: return "K";
        case OpKind::A: return "A";
        case OpKind::B: return "B";
    }
    return "?";
}

OpKind op_kind_from_string(const std::string& name) {
    if (name == "K" || name == "k") return OpKind::K;
    if (name == "A" || name == "a") return OpKind::A;
    if (name == "B" || name == "b") return OpKind::B;
    throw DomainError("unknown operator kind '" + name + "'");
}

FracOpPlan::FracOpPlan(OpKind kind, double order, const ParamSet& pset, const KernelSpec& kernel,
                       const Grid1D& grid, int axis)
    : kind_(kind),
      order_(order),
      pset_(pset),
      kernel_(kernel),
      integrated_(kernel),
      grid_(grid),
      axis_(axis) {
    if (axis < 0) {
        throw AxisError("negative axis");
    }
    if (kind == OpKind::K) {
        if (!(order > 0.0 && order <= 1.0)) throw OrderError("K-op order must lie in (0, 1]");
    } else {
        if (!(order > 0.0 && order < 1.0)) throw OrderError("A-op and B-op order must lie in (0, 1)");
    }
    const double tol = 1e-12 * std::max(1.0, std::abs(grid.b() - grid.a()));
    if (std::abs(pset.a - grid.a()) > tol || std::abs(pset.b - grid.b()) > tol) {
        throw GridMismatch("p-set interval does not match the grid axis");
    }
    integrated_ = kernel.at_order(kind == OpKind::K ? order : 1.0 - order);
    validate_tabulated(integrated_);
    switch (kind) {
        case OpKind::K: build_k(); break;
        case OpKind::B: build_b(); break;
        case OpKind::A: build_a(); break;
    }
}

void FracOpPlan::validate_tabulated(const KernelSpec& k) const {
    if (k.family() != KernelFamily::Tabulated) return;
    const auto& s = k.samples();
    const double h = grid_.h();
    const double span = grid_.b() - grid_.a();
    if (s.front().first > kGaussX.front() * h) {
        throw DomainError("tabulated kernel must start below the first quadrature point of the grid");
    }
    if (s.back().first < span * (1.0 - 1e-12)) {
        throw DomainError("tabulated kernel must cover (0, b - a]");
    }
    for (std::size_t i = 1; i < s.size() && s[i - 1].first < span; ++i) {
        if (s[i].first - s[i - 1].first > 0.5 * h * (1.0 + 1e-12)) {
            throw DomainError("tabulated kernel must be sampled at least at the h/2 scale of the grid");
        }
    }
}

// m0[d] = int_{dh}^{(d+1)h} k,  m1[d] = int_{dh}^{(d+1)h} k(s) (s - dh)/h.
void FracOpPlan::compute_moments(const KernelSpec& k, std::vector<double>& m0,
                                 std::vector<double>* m1) const {
    const int n = grid_.cells();
    const double h = grid_.h();
    m0.assign(n, 0.0);
    if (m1) m1->assign(n, 0.0);
    if (k.family() == KernelFamily::RiemannLiouville) {
        const long double g = k.order();
        const long double hg = std::pow(static_cast<long double>(h), g);
        const long double g0 = gamma_fn(static_cast<double>(g) + 1.0);
        const long double gg = gamma_fn(static_cast<double>(g));
        for (int d = 0; d < n; ++d) {
            const long double dd = d;
            const long double step_g = power_step(dd, g);
            m0[d] = static_cast<double>(hg * step_g / g0);
            if (m1) {
                const long double step_g1 = power_step(dd, g + 1.0L);
                const long double inner = step_g1 / (g + 1.0L) - dd * step_g / g;
                (*m1)[d] = static_cast<double>(hg * inner / gg);
            }
        }
        return;
    }
    for (int d = 0; d < n; ++d) {
        double s0 = 0.0;
        double s1 = 0.0;
        for (std::size_t q = 0; q < kGaussX.size(); ++q) {
            const double u = kGaussX[q];
            const double kv = k((d + u) * h);
            s0 += kGaussW[q] * kv;
            s1 += kGaussW[q] * kv * u;
        }
        m0[d] = s0 * h;
        if (m1) (*m1)[d] = s1 * h;
    }
}

void FracOpPlan::build_k() {
    const int n = grid_.cells();
    const std::size_t np = grid_.size();
    rows_ = cols_ = np;
    left_.assign(np * np, 0.0);
    right_.assign(np * np, 0.0);
    std::vector<double> m0;
    std::vector<double> m1;
    compute_moments(integrated_, m0, &m1);
    const double p = pset_.p;
    const double q = pset_.q;
#pragma omp parallel for schedule(static)
    for (int j = 0; j <= n; ++j) {
        double* lrow = left_.data() + static_cast<std::size_t>(j) * np;
        double* rrow = right_.data() + static_cast<std::size_t>(j) * np;
        for (int d = 0; d < j; ++d) {
            lrow[j - d] += p * (m0[d] - m1[d]);
            lrow[j - d - 1] += p * m1[d];
        }
        for (int d = 0; d < n - j; ++d) {
            rrow[j + d] += q * (m0[d] - m1[d]);
            rrow[j + d + 1] += q * m1[d];
        }
    }
}

void FracOpPlan::build_b() {
    const int n = grid_.cells();
    const std::size_t np = grid_.size();
    rows_ = cols_ = np;
    left_.assign(np * np, 0.0);
    right_.assign(np * np, 0.0);
    std::vector<double> m0;
    compute_moments(integrated_, m0, nullptr);
    const double ph = pset_.p / grid_.h();
    const double qh = pset_.q / grid_.h();
#pragma omp parallel for schedule(static)
    for (int j = 0; j <= n; ++j) {
        double* lrow = left_.data() + static_cast<std::size_t>(j) * np;
        double* rrow = right_.data() + static_cast<std::size_t>(j) * np;
        // Cells c < j lie to the left of t_j, cells c >= j to the right.
        for (int c = 0; c < j; ++c) {
            const double w = ph * m0[j - c - 1];
            lrow[c + 1] += w;
            lrow[c] -= w;
        }
        for (int c = j; c < n; ++c) {
            const double w = qh * m0[c - j];
            rrow[c + 1] += w;
            rrow[c] -= w;
        }
    }
}

void FracOpPlan::build_a() {
    const int n = grid_.cells();
    const std::size_t np = grid_.size();
    rows_ = static_cast<std::size_t>(n);
    cols_ = np;
    left_.assign(rows_ * cols_, 0.0);
    right_.assign(rows_ * cols_, 0.0);
    std::vector<double> m0;
    compute_moments(integrated_, m0, nullptr);
    const double h = grid_.h();
    const double p = pset_.p;
    const double q = pset_.q;
#pragma omp parallel for schedule(static)
    for (int c = 0; c < n; ++c) {
        double* lrow = left_.data() + static_cast<std::size_t>(c) * cols_;
        double* rrow = right_.data() + static_cast<std::size_t>(c) * cols_;
        for (int j = 0; j <= c; ++j) {
            lrow[j] = grid_.weight(j) * p * m0[c - j] / h;
        }
        for (int j = c + 1; j <= n; ++j) {
            rrow[j] = grid_.weight(j) * q * m0[j - c - 1] / h;
        }
    }
}

// Triangular products of the stored weights with one line.
void FracOpPlan::product(const double* f, double* y) const {
    const std::size_t nc = cols_;
    const bool cells = kind_ == OpKind::A;
    for (std::size_t r = 0; r < rows_; ++r) {
        const double* lrow = left_.data() + r * nc;
        const double* rrow = right_.data() + r * nc;
        double acc = 0.0;
        for (std::size_t m = 0; m <= r; ++m) acc += lrow[m] * f[m];
        for (std::size_t m = cells ? r + 1 : r; m < nc; ++m) acc += rrow[m] * f[m];
        y[r] = acc;
    }
}

void FracOpPlan::finish_a(const double* cells, double* y) const {
    const int n = grid_.cells();
    const double h = grid_.h();
    for (int m = 1; m < n; ++m) y[m] = (cells[m] - cells[m - 1]) / h;
    if (n >= 3) {
        y[0] = 2.0 * y[1] - y[2];
        y[n] = 2.0 * y[n - 1] - y[n - 2];
    } else {
        y[0] = y[1];
        y[n] = y[n - 1];
    }
}

void FracOpPlan::apply_line(std::span<const double> in, std::span<double> out) const {
    if (in.size() != grid_.size() || out.size() != grid_.size()) {
        throw GridMismatch("apply_line: line length does not match the plan grid");
    }
    if (kind_ == OpKind::A) {
        std::vector<double> cells(rows_);
        product(in.data(), cells.data());
        finish_a(cells.data(), out.data());
    } else {
        product(in.data(), out.data());
    }
}

void FracOpPlan::apply_line(const double* in, std::size_t in_stride, double* out, std::size_t out_stride,
                            std::span<double> scratch) const {
    const std::size_t np = grid_.size();
    double* f = scratch.data();
    double* y = f + np;
    double* cells = y + np;
    for (std::size_t j = 0; j < np; ++j) f[j] = in[j * in_stride];
    if (kind_ == OpKind::A) {
        product(f, cells);
        finish_a(cells, y);
    } else {
        product(f, y);
    }
    for (std::size_t j = 0; j < np; ++j) out[j * out_stride] = y[j];
}

void FracOpPlan::apply_transpose_line(std::span<const double> in, std::span<double> out) const {
    if (kind_ == OpKind::A) {
        throw DomainError("apply_transpose_line: not available for A plans");
    }
    const std::size_t np = grid_.size();
    if (in.size() != np || out.size() != np) {
        throw GridMismatch("apply_transpose_line: line length does not match the plan grid");
    }
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 0; j < np; ++j) {
        const double* lrow = left_.data() + j * np;
        const double* rrow = right_.data() + j * np;
        const double x = in[j];
        for (std::size_t m = 0; m <= j; ++m) out[m] += lrow[m] * x;
        for (std::size_t m = j; m < np; ++m) out[m] += rrow[m] * x;
    }
}

std::vector<double> FracOpPlan::cell_samples(std::span<const double> in) const {
    if (kind_ != OpKind::A) {
        throw DomainError("cell_samples: only A plans carry cell samples");
    }
    if (in.size() != grid_.size()) {
        throw GridMismatch("cell_samples: line length does not match the plan grid");
    }
    std::vector<double> cells(rows_);
    product(in.data(), cells.data());
    return cells;
}

std::vector<double> FracOpPlan::dense_matrix() const {
    const std::size_t np = grid_.size();
    std::vector<double> mat(np * np, 0.0);
    std::vector<double> e(np, 0.0);
    std::vector<double> col(np);
    for (std::size_t m = 0; m < np; ++m) {
        e[m] = 1.0;
        apply_line(e, col);
        for (std::size_t j = 0; j < np; ++j) mat[j * np + m] = col[j];
        e[m] = 0.0;
    }
    return mat;
}

namespace {

void check_plan_grid(const FracOpPlan& plan, const Field& f) {
    const auto& grid = f.grid();
    if (plan.axis() >= grid.dims()) {
        throw AxisError("plan axis " + std::to_string(plan.axis()) + " out of range for a " +
                        std::to_string(grid.dims()) + "-dimensional grid");
    }
    if (!plan.matches(grid.axis(plan.axis()))) {
        throw GridMismatch("field grid does not match the plan grid along its axis");
    }
}

}  // namespace

Field apply_op_1d(const FracOpPlan& plan, const Field& f) {
    if (f.grid().dims() != 1) {
        throw GridMismatch("apply_op_1d: field is not on a 1D grid");
    }
    if (f.components() != 1) {
        throw LengthMismatch("apply_op_1d: single-component field expected");
    }
    return apply_op_nd(plan, f);
}

Field apply_op_nd(const FracOpPlan& plan, const Field& f) {
    check_plan_grid(plan, f);
    Field out(f.grid(), f.components());
    kernels::apply_lines(plan, f.grid(), f.components(), f.values(), out.values());
    if (plan.kind() == OpKind::A) out.flag_axis(plan.axis());
    return out;
}

Field apply_op_nd_transpose(const FracOpPlan& plan, const Field& f) {
    check_plan_grid(plan, f);
    Field out(f.grid(), f.components());
    kernels::apply_lines_transpose(plan, f.grid(), f.components(), f.values(), out.values());
    return out;
}

Field reference::apply_op_nd(const FracOpPlan& plan, const Field& f) {
    check_plan_grid(plan, f);
    Field out(f.grid(), f.components());
    kernels::apply_lines_serial(plan, f.grid(), f.components(), f.values(), out.values());
    if (plan.kind() == OpKind::A) out.flag_axis(plan.axis());
    return out;
}

Field apply_partial(OpKind kind, double order, const ParamSet& pset, const KernelSpec& kernel,
                    const Field& f, int axis) {
    const FracOpPlan plan(kind, order, pset, kernel, f.grid().axis(axis), axis);
    return apply_op_nd(plan, f);
}

std::vector<Field> frac_gradient(const Field& f, OpKind kind, std::span<const ParamSet> psets,
                                 std::span<const double> orders, std::span<const KernelSpec> kernels) {
    const auto n = static_cast<std::size_t>(f.grid().dims());
    if (psets.size() != n || orders.size() != n || kernels.size() != n) {
        throw LengthMismatch("frac_gradient: p-sets, orders and kernels must have one entry per axis");
    }
    std::vector<Field> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(apply_partial(kind, orders[i], psets[i], kernels[i], f, static_cast<int>(i)));
    }
    return out;
}

void finite_difference_line(std::span<const double> in, std::span<double> out, double h) {
    const std::size_t np = in.size();
    if (np < 3 || out.size() != np) {
        throw GridMismatch("finite_difference_line: need at least three nodes");
    }
    for (std::size_t j = 1; j + 1 < np; ++j) out[j] = (in[j + 1] - in[j - 1]) / (2.0 * h);
    out[0] = (-3.0 * in[0] + 4.0 * in[1] - in[2]) / (2.0 * h);
    out[np - 1] = (3.0 * in[np - 1] - 4.0 * in[np - 2] + in[np - 3]) / (2.0 * h);
}

namespace {

template <typename LineOp>
Field map_lines(const Field& f, int axis, LineOp&& op) {
    const auto& grid = f.grid();
    const auto& ax = grid.axis(axis);
    const std::size_t np = ax.size();
    const std::size_t stride = grid.stride(axis);
    Field out(grid, f.components());
    std::vector<double> in_line(np);
    std::vector<double> out_line(np);
    for (int k = 0; k < f.components(); ++k) {
        auto src = f.component(k);
        auto dst = out.component(k);
        for (std::size_t line = 0; line < grid.line_count(axis); ++line) {
            const std::size_t start = grid.line_start(axis, line);
            for (std::size_t j = 0; j < np; ++j) in_line[j] = src[start + j * stride];
            op(in_line, out_line, ax.h());
            for (std::size_t j = 0; j < np; ++j) dst[start + j * stride] = out_line[j];
        }
    }
    return out;
}

}  // namespace

Field finite_difference(const Field& f, int axis) {
    return map_lines(f, axis, [](std::span<const double> in, std::span<double> out, double h) {
        finite_difference_line(in, out, h);
    });
}

Field second_difference(const Field& f, int axis) {
    if (f.grid().axis(axis).size() < 4) {
        throw GridMismatch("second_difference: need at least four nodes along the axis");
    }
    return map_lines(f, axis, [](std::span<const double> in, std::span<double> out, double h) {
        const std::size_t np = in.size();
        const double h2 = h * h;
        for (std::size_t j = 1; j + 1 < np; ++j) out[j] = (in[j + 1] - 2.0 * in[j] + in[j - 1]) / h2;
        out[0] = (2.0 * in[0] - 5.0 * in[1] + 4.0 * in[2] - in[3]) / h2;
        out[np - 1] = (2.0 * in[np - 1] - 5.0 * in[np - 2] + 4.0 * in[np - 3] - in[np - 4]) / h2;
    });
}

}  // namespace fracvar
