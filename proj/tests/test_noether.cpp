#include <cmath>
#include <limits>

#include "doctest.h"
#include "fracvar/dirichlet.hpp"
#include "fracvar/errors.hpp"
#include "fracvar/noether.hpp"
#include "support.hpp"

using namespace fracvar;
using namespace fracvar::testing;

namespace {

const auto kRl = KernelSpec::riemann_liouville(0.5);
const ParamSet kLeft(0, 1, 1, 0);

ProblemSpec problem(const GridND& g, const std::string& name, int N = 1, const ParamSet& ps = kLeft,
                    double order = 0.5) {
    return make_problem(g, builtin_lagrangian(name, g.dims(), N), ps, order, KernelSpec::riemann_liouville(order));
}

Field random_field(Rng& rng, const GridND& g, int N) {
    Field u(g, N);
    for (int k = 0; k < N; ++k) {
        const Field c = random_smooth_field(rng, g);
        std::copy(c.values().begin(), c.values().end(), u.component(k).begin());
    }
    return u;
}

// xi_k = a_k + b_k u_k + c_k sin(t_1) u_k^2
SymmetryGenerator random_generator(Rng& rng, int N) {
    std::vector<double> a(N), b(N), c(N);
    for (int k = 0; k < N; ++k) {
        a[k] = rng.uniform();
        b[k] = rng.uniform();
        c[k] = rng.uniform();
    }
    return {[a, b, c](std::span<const double> t, std::span<const double> u, std::span<double> xi) {
                for (std::size_t k = 0; k < u.size(); ++k) xi[k] = a[k] + b[k] * u[k] + c[k] * std::sin(t[0]) * u[k] * u[k];
            },
            "random polynomial"};
}

}  // namespace

TEST_CASE("invariance residual examples") {
    const GridND g = unit_grid(2, 16);
    Rng rng(1);
    const Field u = random_field(rng, g, 1);
    CHECK(max_abs(invariance_residual(problem(g, "dirichlet"), u, SymmetryGenerator::zero())) == 0.0);

    const GridND g1 = unit_grid(1, 256);
    const Field u1 = random_field(rng, g1, 1);
    const double c[] = {0.75};
    CHECK(max_abs(invariance_residual(problem(g1, "dirichlet"), u1, SymmetryGenerator::translation(c))) <= 1e-8);

    const Field u2 = random_field(rng, g, 2);
    const Field scaled = invariance_residual(problem(g, "mass", 2), u2, SymmetryGenerator::scaling());
    for (std::size_t node = 0; node < g.node_count(); ++node) {
        const double expect = 2.0 * (u2(0, node) * u2(0, node) + u2(1, node) * u2(1, node));
        CHECK(scaled[node] == doctest::Approx(expect).epsilon(1e-14));
    }
    CHECK(max_abs(scaled) > 0.0);

    ProblemSpec classical = problem(g, "mixed");
    CHECK_THROWS_AS(invariance_residual(classical, u, SymmetryGenerator::zero()), DomainError);
    CHECK_THROWS_AS(noether_residual(classical, u, SymmetryGenerator::zero()), DomainError);
}

TEST_CASE("invariance residual for translations stays at rounding level under refinement") {
    Rng rng(2);
    const double c[] = {-1.5};
    for (int n : {32, 64, 128, 256}) {
        const GridND g = unit_grid(1, n);
        const Field u = random_field(rng, g, 1);
        const ProblemSpec spec = problem(g, "dirichlet", 1, ParamSet(0, 1, 0.4, 0.8), 0.3);
        CHECK(max_abs(invariance_residual(spec, u, SymmetryGenerator::translation(c))) <= 1e-9);
    }
}

TEST_CASE("bracket examples") {
    const GridND g = unit_grid(2, 20);
    Rng rng(3);
    const Field f = random_smooth_field(rng, g);
    const Field gg = random_smooth_field(rng, g);
    const ParamSet ps(0, 1, 0.6, 0.2);
    CHECK(max_abs(bracket_D(Field(g), gg, ps, 0.5, kRl, 0)) == 0.0);

    const Field c = Field::constant(g, 2.5);
    const Field d = bracket_D(c, gg, ps, 0.5, kRl, 1);
    const Field expect = 2.5 * apply_partial(OpKind::A, 0.5, dual(ps), kRl, gg, 1);
    CHECK(max_abs(d - expect) <= 1e-12 * std::max(1.0, max_abs(expect)));

    const ParamSet sym(0, 1, 0.5, 0.5);
    CHECK(max_abs(bracket_I(f, f, sym, 0.4, kRl, 0)) <= 1e-12);
    CHECK(max_abs(bracket_I(f, Field(g), ps, 0.4, kRl, 1)) == 0.0);
    CHECK_THROWS_AS(bracket_I(f, Field(unit_grid(2, 10)), ps, 0.4, kRl, 0), GridMismatch);
}

TEST_CASE("property: brackets are bilinear") {
    Rng rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        const int dims = rng.integer(1, 2);
        const GridND g = unit_grid(dims, rng.integer(4, 24));
        const Field f1 = random_smooth_field(rng, g);
        const Field f2 = random_smooth_field(rng, g);
        const Field h = random_smooth_field(rng, g);
        const double c = rng.uniform(-2, 2);
        const ParamSet ps = random_pset(rng);
        const double alpha = rng.uniform(0.1, 0.9);
        const auto k = KernelSpec::riemann_liouville(alpha);
        const int axis = rng.integer(0, dims - 1);
        for (auto bracket : {&bracket_D, &bracket_I}) {
            const Field left = bracket(c * f1 + f2, h, ps, alpha, k, axis);
            const Field left_sum = c * bracket(f1, h, ps, alpha, k, axis) + bracket(f2, h, ps, alpha, k, axis);
            CHECK(max_abs(left - left_sum) <= 1e-12 * std::max(1.0, max_abs(left)));
            const Field right = bracket(h, c * f1 + f2, ps, alpha, k, axis);
            const Field right_sum = c * bracket(h, f1, ps, alpha, k, axis) + bracket(h, f2, ps, alpha, k, axis);
            CHECK(max_abs(right - right_sum) <= 1e-12 * std::max(1.0, max_abs(right)));
        }
    }
}

TEST_CASE("property: I[f, g; P] = -I[g, f; P*]") {
    Rng rng(6);
    for (int trial = 0; trial < 60; ++trial) {
        const int dims = rng.integer(1, 2);
        const GridND g = unit_grid(dims, rng.integer(4, 24));
        const Field f = random_smooth_field(rng, g);
        const Field h = random_smooth_field(rng, g);
        const ParamSet ps = random_pset(rng);
        const double beta = rng.uniform(0.1, 1.0);
        const auto k = KernelSpec::riemann_liouville(beta);
        const int axis = rng.integer(0, dims - 1);
        const Field a = bracket_I(f, h, ps, beta, k, axis);
        const Field b = bracket_I(h, f, dual(ps), beta, k, axis);
        CHECK(max_abs(a + b) <= 1e-12 * std::max(1.0, max_abs(a)));
        // Direct expansion of the definition.
        const Field direct = hadamard(h, apply_partial(OpKind::K, beta, ps, k, f, axis)) -
                             hadamard(f, apply_partial(OpKind::K, beta, dual(ps), k, h, axis));
        CHECK(max_abs(a - direct) <= 1e-12 * std::max(1.0, max_abs(a)));
    }
}

TEST_CASE("property: noether - invariance + sum xi el vanishes for any field") {
    Rng rng(7);
    const std::vector<std::string> names = {"dirichlet", "integral-coupled", "mass", "fractional-wave", "constant"};
    for (int trial = 0; trial < 60; ++trial) {
        const int dims = rng.integer(1, 2);
        const int N = rng.integer(1, 2);
        const GridND g = unit_grid(dims, rng.integer(4, 20));
        Lagrangian lag = builtin_lagrangian(names[rng.integer(0, 4)], dims, N);
        if (rng.integer(0, 1)) lag = lag + builtin_lagrangian(names[rng.integer(0, 4)], dims, N);
        const double alpha = rng.uniform(0.1, 0.9);
        ProblemSpec spec = make_problem(g, lag, random_pset(rng), alpha, KernelSpec::riemann_liouville(alpha));
        spec.psets2.assign(dims, random_pset(rng));
        spec.betas.assign(dims, rng.uniform(0.1, 1.0));
        spec.kernels_beta.assign(dims, KernelSpec::riemann_liouville(spec.betas[0]));
        const Field u = random_field(rng, g, N);
        const SymmetryGenerator gen = random_generator(rng, N);
        const Field nr = noether_residual(spec, u, gen);
        const Field ir = invariance_residual(spec, u, gen);
        const Field el = el_residual(spec, u);
        const Field xi = sample_generator(gen, u);
        Field chain = nr - ir;
        for (int k = 0; k < N; ++k) chain += hadamard(xi.extract(k), el.extract(k));
        const double scale = std::max({1.0, max_abs(nr), max_abs(ir)});
        CHECK(max_abs(chain) <= 1e-10 * scale);
    }
}

TEST_CASE("translations at the Dirichlet minimizer: noether reduces to the EL residual") {
    const GridND g = unit_grid(1, 128);
    const Field psi = Field::sample(g, [](auto t) { return t[0]; });
    const DirichletSpec ds = make_dirichlet(g, kLeft, 0.5, kRl, psi);
    const MinimizeResult m = minimize_energy(ds);
    ProblemSpec spec = problem(g, "dirichlet");
    spec.boundary = psi;
    const double c[] = {1.0};
    const auto gen = SymmetryGenerator::translation(c);
    const Field nr = noether_residual(spec, m.u, gen);
    const Field el = el_residual(spec, m.u);
    CHECK(max_abs(nr + el) <= 1e-12 * std::max(1.0, max_abs(el)));
    const double extremal = max_abs_interior(nr);
    CHECK(extremal <= 10.0 * ds.tol);

    Rng rng(8);
    const Field noisy = random_field(rng, g, 1);
    const double other = max_abs_interior(noether_residual(problem(g, "dirichlet"), noisy, gen));
    CHECK(other >= 10.0 * extremal);
}

TEST_CASE("generator sampling and smoothness heuristic") {
    const GridND g = unit_grid(2, 32);
    const Field u = Field::sample(g, [](auto t) { return t[0] - t[1]; });
    const SymmetryGenerator smooth{[](std::span<const double> t, std::span<const double> x, std::span<double> xi) {
                                       xi[0] = std::cos(t[0]) * x[0];
                                   },
                                   "smooth"};
    CHECK(is_smooth(sample_generator(smooth, u)));
    const SymmetryGenerator jump{[](std::span<const double> t, std::span<const double>, std::span<double> xi) {
                                     xi[0] = t[1] < 0.5 ? 0.0 : 1.0;
                                 },
                                 "jump"};
    CHECK_FALSE(is_smooth(sample_generator(jump, u)));
    const SymmetryGenerator bad{[](std::span<const double>, std::span<const double>, std::span<double> xi) {
                                    xi[0] = std::numeric_limits<double>::infinity();
                                },
                                "bad"};
    CHECK_THROWS_AS(sample_generator(bad, u), EvalError);
    const double c2[] = {1.0, 2.0};
    CHECK_THROWS_AS(sample_generator(SymmetryGenerator::translation(c2), u), LengthMismatch);
}
