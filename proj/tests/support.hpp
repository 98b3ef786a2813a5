#pragma once

// Independent oracles and random generators shared by the test suites.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "fracvar/core_model.hpp"

namespace fracvar::testing {

using Fn1 = std::function<double(double)>;

// Adaptive Simpson; good to ~tol on smooth integrands.
inline double simpson_step(const Fn1& f, double a, double b, double fa, double fm, double fb, double whole,
                           double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const Fn1& f, double a, double b, double tol = 1e-13) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, 50);
}

// Left Riemann-Liouville integral of order g on (a, t). The substitution
// s = (t - tau)^g removes the kernel singularity.
inline double rl_left(const Fn1& f, double a, double t, double g) {
    if (t <= a) return 0.0;
    const double scale = 1.0 / std::tgamma(g + 1.0);
    return scale * integrate([&](double s) { return f(t - std::pow(s, 1.0 / g)); }, 0.0, std::pow(t - a, g));
}

// Right Riemann-Liouville integral of order g on (t, b).
inline double rl_right(const Fn1& f, double t, double b, double g) {
    if (t >= b) return 0.0;
    const double scale = 1.0 / std::tgamma(g + 1.0);
    return scale * integrate([&](double s) { return f(t + std::pow(s, 1.0 / g)); }, 0.0, std::pow(b - t, g));
}

// Right-sided derivative d/dt of the order 1-alpha right integral of
// g(t) = t^(1-alpha) / Gamma(2-alpha) on (t, 1): the time part of the
// separable wave oracle. Closed form after differentiating under the
// integral sign and removing the endpoint singularity.
inline double right_a_of_left_b_of_t(double t, double alpha) {
    const double c = 1.0 / (std::tgamma(1.0 - alpha) * std::tgamma(2.0 - alpha));
    const double p = 1.0 / (1.0 - alpha);
    const double inner = integrate([&](double r) { return std::pow(t + (1.0 - t) * std::pow(r, p), -alpha); }, 0.0, 1.0,
                                   1e-12);
    return c * (-std::pow(1.0 - t, -alpha) + std::pow(1.0 - t, 1.0 - alpha) * inner);
}

struct Rng {
    explicit Rng(std::uint64_t seed) : engine(seed) {}
    double uniform(double lo = -1.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(engine);
    }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }
    std::mt19937_64 engine;
};

// Random smooth function of t: a few trigonometric modes per axis plus a
// low-degree polynomial.
struct SmoothFn {
    std::vector<std::vector<double>> coeffs;  // per axis: c0, c1, s1, c2, s2, lin, quad
    double shift = 0.0;

    static SmoothFn random(Rng& rng, int dims) {
        SmoothFn f;
        f.shift = rng.uniform();
        for (int i = 0; i < dims; ++i) {
            std::vector<double> c(7);
            for (double& x : c) x = rng.uniform();
            f.coeffs.push_back(c);
        }
        return f;
    }

    double operator()(std::span<const double> t) const {
        double acc = shift;
        double prod = 1.0;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            const auto& c = coeffs[i];
            const double x = std::numbers::pi * t[i];
            acc += c[0] * std::cos(x) + c[1] * std::sin(x) + c[2] * std::cos(2 * x) + c[3] * std::sin(2 * x) +
                   c[5] * t[i] + c[6] * t[i] * t[i];
            prod *= 1.0 + 0.3 * c[4] * t[i];
        }
        return acc * prod;
    }
};

inline Field random_smooth_field(Rng& rng, const GridND& grid) {
    const SmoothFn f = SmoothFn::random(rng, grid.dims());
    return Field::sample(grid, [&](std::span<const double> t) { return f(t); });
}

inline Field random_noise_field(Rng& rng, const GridND& grid, int components = 1) {
    Field f(grid, components);
    for (double& v : f.values()) v = rng.uniform();
    return f;
}

inline ParamSet random_pset(Rng& rng, double a = 0.0, double b = 1.0) {
    return ParamSet(a, b, rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
}

inline GridND unit_grid(int dims, int n) {
    std::vector<std::pair<double, double>> box(dims, {0.0, 1.0});
    return GridND::uniform(box, n);
}

// Max |value| over nodes whose coordinates all lie in [lo, hi] on `axis`
// and off the boundary.
inline double max_abs_window(const Field& f, int axis, double lo, double hi) {
    double m = 0.0;
    const auto& grid = f.grid();
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
        if (grid.on_boundary(node)) continue;
        const double t = grid.axis(axis).node(grid.index_along(node, axis));
        if (t < lo || t > hi) continue;
        m = std::max(m, std::abs(f[node]));
    }
    return m;
}

}  // namespace fracvar::testing
