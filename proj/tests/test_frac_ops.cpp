#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fracvar/errors.hpp"
#include "fracvar/frac_ops.hpp"
#include "support.hpp"

using namespace fracvar;
using namespace fracvar::testing;

namespace {

const ParamSet kLeft = ParamSet::left(0.0, 1.0);

Field line_field(int n, const Fn1& f) {
    return Field::sample(GridND(Grid1D(0, 1, n)), [&](std::span<const double> t) { return f(t[0]); });
}

Field apply1(OpKind kind, double order, const ParamSet& pset, const KernelSpec& kernel, const Field& f) {
    return apply_op_1d(FracOpPlan(kind, order, pset, kernel, f.grid().axis(0)), f);
}

// Max interior |computed - oracle(t)| over nodes with t in [lo, hi].
double interior_error(const Field& out, const Fn1& oracle, double lo = 0.0, double hi = 1.0) {
    const auto& ax = out.grid().axis(0);
    double err = 0.0;
    for (std::size_t j = 1; j + 1 < ax.size(); ++j) {
        const double t = ax.node(j);
        if (t < lo || t > hi) continue;
        err = std::max(err, std::abs(out[j] - oracle(t)));
    }
    return err;
}

// Direct quadrature of K_P f at t.
double k_oracle(const Fn1& f, const ParamSet& ps, double t, double order) {
    return ps.p * rl_left(f, ps.a, t, order) + ps.q * rl_right(f, t, ps.b, order);
}

double order_estimate(double e_coarse, double e_fine, double ratio) {
    return std::log(e_coarse / e_fine) / std::log(ratio);
}

}  // namespace

TEST_CASE("K with the constant kernel is the running integral") {
    const Field f = line_field(64, [](double) { return 1.0; });
    const Field out = apply1(OpKind::K, 0.5, kLeft, KernelSpec::constant(), f);
    double err = 0.0;
    for (std::size_t j = 0; j < out.node_count(); ++j) err = std::max(err, std::abs(out[j] - f.grid().axis(0).node(j)));
    CHECK(err <= 1e-12);
}

TEST_CASE("RL K of one is 2 sqrt(t / pi)") {
    const Field f = line_field(512, [](double) { return 1.0; });
    const Field out = apply1(OpKind::K, 0.5, kLeft, KernelSpec::riemann_liouville(0.5), f);
    CHECK(out[512] == doctest::Approx(1.1283791671).epsilon(1e-10));
    const double brute = rl_left([](double) { return 1.0; }, 0.0, 1.0, 0.5);
    CHECK(out[512] == doctest::Approx(brute).epsilon(1e-10));
    CHECK(interior_error(out, [](double t) { return 2.0 * std::sqrt(t / std::numbers::pi); }) <= 1e-12);
}

TEST_CASE("B of a constant vanishes for every kernel family") {
    const Field f = line_field(40, [](double) { return 3.7; });
    const KernelSpec kernels[] = {KernelSpec::riemann_liouville(0.3), KernelSpec::constant()};
    for (const auto& k : kernels) {
        const Field out = apply1(OpKind::B, 0.3, ParamSet(0, 1, 0.7, -1.2), k, f);
        CHECK(max_abs(out) <= 1e-12);
    }
}

TEST_CASE("RL B of t is t^0.5 / Gamma(1.5)") {
    const Field f = line_field(512, [](double t) { return t; });
    const Field out = apply1(OpKind::B, 0.5, kLeft, KernelSpec::riemann_liouville(0.5), f);
    CHECK(out[128] == doctest::Approx(0.5641895835).epsilon(1e-9));
    const double brute = rl_left([](double) { return 1.0; }, 0.0, 0.25, 0.5);
    CHECK(out[128] == doctest::Approx(brute).epsilon(1e-10));
    CHECK(interior_error(out, [](double t) { return std::sqrt(t) / std::tgamma(1.5); }) <= 1e-12);
}

TEST_CASE("A with the constant kernel recovers f") {
    for (int n : {64, 128}) {
        const Field f = line_field(n, [](double t) { return std::sin(t); });
        const Field out = apply1(OpKind::A, 0.5, kLeft, KernelSpec::constant(), f);
        CHECK(out.is_flagged(0));
        const double h = 1.0 / n;
        CHECK(interior_error(out, [](double t) { return std::sin(t); }) <= 0.5 * h * h);
    }
}

TEST_CASE("zero weights give the zero operator") {
    const Field f = line_field(32, [](double t) { return std::exp(t); });
    for (OpKind kind : {OpKind::K, OpKind::A, OpKind::B}) {
        CHECK(max_abs(apply1(kind, 0.5, ParamSet(0, 1, 0, 0), KernelSpec::riemann_liouville(0.5), f)) == 0.0);
    }
}

TEST_CASE("K, B and A agree with direct quadrature for mixed p-sets") {
    const ParamSet ps(0, 1, 0.8, -0.6);
    const double alpha = 0.35;
    const Fn1 f = [](double t) { return std::cos(2.0 * t) + t * t; };
    const Fn1 df = [](double t) { return -2.0 * std::sin(2.0 * t) + 2.0 * t; };
    const Field samples = line_field(512, f);
    const auto rl = KernelSpec::riemann_liouville(alpha);

    const Field k = apply1(OpKind::K, alpha, ps, rl, samples);
    CHECK(interior_error(k, [&](double t) { return k_oracle(f, ps, t, alpha); }) <= 1e-6);

    const Field b = apply1(OpKind::B, alpha, ps, rl, samples);
    CHECK(interior_error(b, [&](double t) { return k_oracle(df, ps, t, 1.0 - alpha); }) <= 1e-4);

    // A = d/dt K^{1-alpha}: endpoint terms from differentiating the limits.
    const double g = 1.0 - alpha;
    const Fn1 a_oracle = [&](double t) {
        const double left = f(0.0) * std::pow(t, -alpha) / std::tgamma(g) + rl_left(df, 0.0, t, g);
        const double right = -f(1.0) * std::pow(1.0 - t, -alpha) / std::tgamma(g) + rl_right(df, t, 1.0, g);
        return ps.p * left + ps.q * right;
    };
    const Field a = apply1(OpKind::A, alpha, ps, rl, samples);
    CHECK(interior_error(a, a_oracle, 0.1, 0.9) <= 5e-4);
}

TEST_CASE("order validation") {
    const Grid1D g(0, 1, 8);
    const auto rl = KernelSpec::riemann_liouville(0.5);
    CHECK_THROWS_AS(FracOpPlan(OpKind::A, 1.0, kLeft, rl, g), OrderError);
    CHECK_THROWS_AS(FracOpPlan(OpKind::B, 0.0, kLeft, rl, g), OrderError);
    CHECK_THROWS_AS(FracOpPlan(OpKind::K, 1.2, kLeft, rl, g), OrderError);
    CHECK_NOTHROW(FracOpPlan(OpKind::K, 1.0, kLeft, rl, g));
}

TEST_CASE("grid and axis mismatches") {
    const Grid1D g(0, 1, 8);
    const auto rl = KernelSpec::riemann_liouville(0.5);
    CHECK_THROWS_AS(FracOpPlan(OpKind::K, 0.5, ParamSet::left(0, 2), rl, g), GridMismatch);
    const FracOpPlan plan(OpKind::K, 0.5, kLeft, rl, g);
    CHECK_THROWS_AS(apply_op_1d(plan, Field(GridND(Grid1D(0, 1, 9)))), GridMismatch);
    const GridND g2 = unit_grid(2, 8);
    CHECK_THROWS_AS(apply_op_nd(FracOpPlan(OpKind::K, 0.5, kLeft, rl, g, 5), Field(g2)), AxisError);
    CHECK_THROWS_AS(apply_partial(OpKind::K, 0.5, kLeft, rl, Field(g2), 5), AxisError);
}

TEST_CASE("partial B of a function constant along the axis vanishes") {
    const GridND g = unit_grid(2, 16);
    const Field f = Field::sample(g, [](auto t) { return t[1]; });
    CHECK(max_abs(apply_partial(OpKind::B, 0.5, kLeft, KernelSpec::riemann_liouville(0.5), f, 0)) <= 1e-13);
}

TEST_CASE("partial K of a separable field equals the 1D result times the frozen factor") {
    const int n = 32;
    const GridND g({Grid1D(0, 1, n), Grid1D(0, 1, n + 3)});
    const Fn1 gx = [](double t) { return std::exp(t) - t; };
    const Fn1 hy = [](double y) { return 1.0 + y * y; };
    const Field f = Field::sample(g, [&](auto t) { return gx(t[0]) * hy(t[1]); });
    const ParamSet ps(0, 1, 0.6, 0.4);
    const auto rl = KernelSpec::riemann_liouville(0.4);
    const Field out = apply_partial(OpKind::K, 0.4, ps, rl, f, 0);
    const Field line = apply1(OpKind::K, 0.4, ps, rl, line_field(n, gx));
    double err = 0.0;
    for (std::size_t node = 0; node < g.node_count(); ++node) {
        const auto t = g.coords(node);
        const double expect = hy(t[1]) * line[g.index_along(node, 0)];
        err = std::max(err, std::abs(out[node] - expect) / std::max(1.0, std::abs(expect)));
    }
    CHECK(err <= 1e-14);
}

TEST_CASE("frac_gradient examples") {
    const GridND g = unit_grid(2, 64);
    const std::vector<ParamSet> ps(2, kLeft);
    const std::vector<double> orders(2, 0.5);
    const std::vector<KernelSpec> ks(2, KernelSpec::riemann_liouville(0.5));

    Field c = Field::constant(g, 2.0, 3);
    const auto gc = frac_gradient(c, OpKind::B, ps, orders, ks);
    REQUIRE(gc.size() == 2);
    for (const auto& comp : gc) {
        CHECK(comp.components() == 3);
        CHECK(max_abs(comp) <= 1e-12);
    }

    const Field f = Field::sample(g, [](auto t) { return t[0]; });
    const auto gf = frac_gradient(f, OpKind::B, ps, orders, ks);
    double err0 = 0.0;
    for (std::size_t node = 0; node < g.node_count(); ++node) {
        const double t0 = g.coords(node)[0];
        err0 = std::max(err0, std::abs(gf[0][node] - std::sqrt(t0) / std::tgamma(1.5)));
    }
    CHECK(err0 <= 1e-12);
    CHECK(max_abs(gf[1]) <= 1e-13);

    const GridND g1 = unit_grid(1, 32);
    const Field f1 = Field::sample(g1, [](auto t) { return std::sin(t[0]); });
    const auto single = frac_gradient(f1, OpKind::K, std::span(ps).first(1), std::span(orders).first(1),
                                      std::span(ks).first(1));
    const Field direct = apply1(OpKind::K, 0.5, kLeft, ks[0], f1);
    CHECK(max_abs(single[0] - direct) == 0.0);

    CHECK_THROWS_AS(frac_gradient(f, OpKind::K, std::span(ps).first(1), orders, ks), LengthMismatch);
}

TEST_CASE("property: every operator is linear") {
    Rng rng(2024);
    int instances = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int dims = rng.integer(1, 2);
        const GridND g = unit_grid(dims, rng.integer(4, 40));
        const OpKind kind = static_cast<OpKind>(rng.integer(0, 2));
        const double alpha = rng.uniform(0.05, 0.95);
        const KernelSpec k = rng.integer(0, 3) == 0 ? KernelSpec::constant() : KernelSpec::riemann_liouville(alpha);
        const int axis = rng.integer(0, dims - 1);
        const FracOpPlan plan(kind, alpha, random_pset(rng), k, g.axis(axis), axis);
        const Field f = random_smooth_field(rng, g);
        const Field h = random_noise_field(rng, g);
        const double c = rng.uniform(-3, 3);
        const Field lhs = apply_op_nd(plan, c * f + h);
        const Field rhs = c * apply_op_nd(plan, f) + apply_op_nd(plan, h);
        const double scale = std::max(1.0, max_abs(lhs));
        CHECK(max_abs(lhs - rhs) <= 1e-12 * scale);
        ++instances;
    }
    CHECK(instances >= 50);
}

TEST_CASE("property: discrete L1 bound for K") {
    Rng rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = rng.integer(16, 256);
        const GridND g = unit_grid(1, n);
        const double alpha = rng.uniform(0.1, 1.0);
        const ParamSet ps = random_pset(rng);
        const KernelSpec k = KernelSpec::riemann_liouville(alpha);
        const Field f = random_smooth_field(rng, g);
        const Field out = apply1(OpKind::K, alpha, ps, k, f);
        const double h = 1.0 / n;
        double lhs = 0.0;
        double mass = 0.0;
        for (std::size_t j = 0; j < g.node_count(); ++j) {
            lhs += h * std::abs(out[j]);
            mass += h * std::abs(f[j]);
        }
        const double bound = (std::abs(ps.p) + std::abs(ps.q)) * kernel_l1_norm(k, 1.0) * mass;
        CHECK(lhs <= bound + 2.0 * h * max_abs(f) * kernel_l1_norm(k, 1.0) * (std::abs(ps.p) + std::abs(ps.q)));
    }
}

TEST_CASE("A samples are the staggered difference of its cell samples") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = rng.integer(4, 64);
        const GridND g = unit_grid(1, n);
        const double alpha = rng.uniform(0.05, 0.95);
        const FracOpPlan plan(OpKind::A, alpha, random_pset(rng), KernelSpec::riemann_liouville(alpha), g.axis(0));
        const Field f = random_smooth_field(rng, g);
        const auto cells = plan.cell_samples(f.values());
        const Field out = apply_op_1d(plan, f);
        REQUIRE(cells.size() == static_cast<std::size_t>(n));
        const double h = 1.0 / n;
        for (int m = 1; m < n; ++m) CHECK(out[m] == (cells[m] - cells[m - 1]) / h);
    }
}

TEST_CASE("A tracks the finite-difference derivative of K^{1-alpha} away from the ends") {
    const int n = 256;
    const double alpha = 0.4;
    const ParamSet ps(0, 1, 0.7, 0.3);
    const auto rl = KernelSpec::riemann_liouville(alpha);
    const Field f = line_field(n, [](double t) { return std::exp(-t) + t; });
    const Field a = apply1(OpKind::A, alpha, ps, rl, f);
    const Field kf = apply1(OpKind::K, 1.0 - alpha, ps, rl, f);
    const Field dk = finite_difference(kf, 0);
    CHECK(max_abs_window(a - dk, 0, 0.1, 0.9) <= 1e-2);
}

TEST_CASE("summation by parts: A_{P*} is the weighted adjoint of B_P") {
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = rng.integer(4, 64);
        const GridND g = unit_grid(1, n);
        const double alpha = rng.uniform(0.05, 0.95);
        const ParamSet ps = random_pset(rng);
        const KernelSpec k = rng.integer(0, 1) ? KernelSpec::constant() : KernelSpec::riemann_liouville(alpha);
        const Field f = random_noise_field(rng, g);
        Field eta = random_noise_field(rng, g);
        eta[0] = 0.0;
        eta[n] = 0.0;
        const Field b = apply1(OpKind::B, alpha, ps, k, eta);
        const Field a = apply1(OpKind::A, alpha, dual(ps), k, f);
        double lhs = 0.0;
        double rhs = 0.0;
        for (int j = 0; j <= n; ++j) {
            lhs += g.weight(j) * f[j] * b[j];
            rhs -= g.weight(j) * eta[j] * a[j];
        }
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("transpose application matches the dense matrix") {
    Rng rng(13);
    for (OpKind kind : {OpKind::K, OpKind::B}) {
        const int n = 17;
        const FracOpPlan plan(kind, 0.45, ParamSet(0, 1, 1.3, -0.4), KernelSpec::riemann_liouville(0.45),
                              Grid1D(0, 1, n));
        const auto mat = plan.dense_matrix();
        std::vector<double> x(n + 1);
        for (double& v : x) v = rng.uniform();
        std::vector<double> y(n + 1);
        plan.apply_transpose_line(x, y);
        for (int m = 0; m <= n; ++m) {
            double expect = 0.0;
            for (int j = 0; j <= n; ++j) expect += mat[j * (n + 1) + m] * x[j];
            CHECK(y[m] == doctest::Approx(expect).epsilon(1e-13));
        }
    }
    const FracOpPlan a(OpKind::A, 0.5, kLeft, KernelSpec::riemann_liouville(0.5), Grid1D(0, 1, 8));
    std::vector<double> in(9, 1.0);
    std::vector<double> out(9);
    CHECK_THROWS_AS(a.apply_transpose_line(in, out), DomainError);
}

TEST_CASE("left weights are lower-triangular, right weights upper-triangular") {
    for (OpKind kind : {OpKind::K, OpKind::B, OpKind::A}) {
        const FracOpPlan plan(kind, 0.5, ParamSet(0, 1, 1, 1), KernelSpec::riemann_liouville(0.5), Grid1D(0, 1, 12));
        const std::size_t rows = plan.weight_rows();
        const std::size_t cols = plan.weight_cols();
        CHECK(cols == 13);
        CHECK(rows == (kind == OpKind::A ? 12u : 13u));
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                if (c > r) CHECK(plan.left_weights()[r * cols + c] == 0.0);
                if (c < r) CHECK(plan.right_weights()[r * cols + c] == 0.0);
            }
        }
    }
}

TEST_CASE("convergence orders on t^2") {
    const double alpha = 0.5;
    const auto rl = KernelSpec::riemann_liouville(alpha);
    const Fn1 sq = [](double t) { return t * t; };
    const Fn1 k_exact = [&](double t) { return 2.0 * std::pow(t, 2.0 + alpha) / std::tgamma(3.0 + alpha); };
    const Fn1 b_exact = [&](double t) { return 2.0 * std::pow(t, 2.0 - alpha) / std::tgamma(3.0 - alpha); };
    const double ek128 = interior_error(apply1(OpKind::K, alpha, kLeft, rl, line_field(128, sq)), k_exact);
    const double ek512 = interior_error(apply1(OpKind::K, alpha, kLeft, rl, line_field(512, sq)), k_exact);
    const double eb128 = interior_error(apply1(OpKind::B, alpha, kLeft, rl, line_field(128, sq)), b_exact);
    const double eb512 = interior_error(apply1(OpKind::B, alpha, kLeft, rl, line_field(512, sq)), b_exact);
    const double ok = order_estimate(ek128, ek512, 4.0);
    const double ob = order_estimate(eb128, eb512, 4.0);
    CHECK(ok >= 1.5);
    CHECK(ob >= 2.0 - alpha - 0.25);
    CHECK(ob <= 2.0 - alpha + 0.25);
}

TEST_CASE("computed moments for other kernels: Gauss path matches the RL closed form") {
    const double alpha = 0.5;
    // K at order 1 with the RL family is the running integral; the constant
    // kernel uses the Gauss path for the same operator.
    const Field f = line_field(48, [](double t) { return std::cos(3.0 * t); });
    const Field rl = apply1(OpKind::K, 1.0, kLeft, KernelSpec::riemann_liouville(alpha), f);
    const Field cst = apply1(OpKind::K, 1.0, kLeft, KernelSpec::constant(), f);
    CHECK(max_abs(rl - cst) <= 1e-14);
}

TEST_CASE("tabulated kernels") {
    const int n = 16;
    const double h = 1.0 / n;
    std::vector<std::pair<double, double>> fine;
    for (int i = 0; i <= 4 * n; ++i) {
        const double s = std::max(i * h / 4.0, 1e-3);
        fine.emplace_back(s, 1.0 + s);
    }
    const KernelSpec tab = KernelSpec::tabulated(fine);
    const Field one = line_field(n, [](double) { return 1.0; });
    const Field out = apply1(OpKind::K, 0.5, kLeft, tab, one);
    CHECK(interior_error(out, [](double t) { return t + 0.5 * t * t; }) <= 1e-4);

    std::vector<std::pair<double, double>> coarse;
    for (int i = 0; i <= 4; ++i) coarse.emplace_back(std::max(0.25 * i, 1e-3), 1.0);
    CHECK_THROWS_AS(FracOpPlan(OpKind::K, 0.5, kLeft, KernelSpec::tabulated(coarse), Grid1D(0, 1, n)), DomainError);

    const KernelSpec short_tab = KernelSpec::tabulated({{1e-3, 1.0}, {0.01, 1.0}, {0.02, 1.0}});
    CHECK_THROWS_AS(FracOpPlan(OpKind::K, 0.5, kLeft, short_tab, Grid1D(0, 1, n)), DomainError);
}

TEST_CASE("finite differences are exact on low-degree polynomials") {
    const GridND g({Grid1D(0, 1, 10), Grid1D(-1, 2, 7)});
    const Field quad = Field::sample(g, [](auto t) { return 3.0 * t[0] * t[0] - t[0] + t[1]; });
    const Field d0 = finite_difference(quad, 0);
    const Field cubic = Field::sample(g, [](auto t) { return t[1] * t[1] * t[1] - 2.0 * t[1] * t[1] + t[0]; });
    const Field dd1 = second_difference(cubic, 1);
    for (std::size_t node = 0; node < g.node_count(); ++node) {
        const auto t = g.coords(node);
        CHECK(d0[node] == doctest::Approx(6.0 * t[0] - 1.0).epsilon(1e-10));
        CHECK(dd1[node] == doctest::Approx(6.0 * t[1] - 4.0).epsilon(1e-9));
    }
    CHECK_THROWS_AS(second_difference(Field(GridND(Grid1D(0, 1, 2))), 0), GridMismatch);
}
