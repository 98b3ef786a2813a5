#include <algorithm>

#include "fracvar/errors.hpp"
#include "fracvar/variational.hpp"

namespace fracvar {

namespace {

using Span = std::span<double>;

void zero(Span du, Span dv, Span dw) {
    std::fill(du.begin(), du.end(), 0.0);
    std::fill(dv.begin(), dv.end(), 0.0);
    std::fill(dw.begin(), dw.end(), 0.0);
}

double sum_squares(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return acc;
}

Lagrangian constant_lagrangian(int n, int N) {
    return Lagrangian(
        "constant", n, N, [](const LagrangianPoint&) { return 1.0; },
        [](const LagrangianPoint&, Span du, Span dv, Span dw) { zero(du, dv, dw); });
}

// |v|^2
Lagrangian dirichlet_lagrangian(int n, int N) {
    return Lagrangian(
        "dirichlet", n, N, [](const LagrangianPoint& pt) { return sum_squares(pt.v); },
        [](const LagrangianPoint& pt, Span du, Span dv, Span dw) {
            zero(du, dv, dw);
            for (std::size_t j = 0; j < dv.size(); ++j) dv[j] = 2.0 * pt.v[j];
        });
}

// |u|^2
Lagrangian mass_lagrangian(int n, int N) {
    return Lagrangian(
        "mass", n, N, [](const LagrangianPoint& pt) { return sum_squares(pt.u); },
        [](const LagrangianPoint& pt, Span du, Span dv, Span dw) {
            zero(du, dv, dw);
            for (std::size_t k = 0; k < du.size(); ++k) du[k] = 2.0 * pt.u[k];
        });
}

// |v|^2 + |w|^2, meant for the classical third block.
Lagrangian mixed_lagrangian(int n, int N) {
    return Lagrangian(
        "mixed", n, N, [](const LagrangianPoint& pt) { return sum_squares(pt.v) + sum_squares(pt.w); },
        [](const LagrangianPoint& pt, Span du, Span dv, Span dw) {
            zero(du, dv, dw);
            for (std::size_t j = 0; j < dv.size(); ++j) {
                dv[j] = 2.0 * pt.v[j];
                dw[j] = 2.0 * pt.w[j];
            }
        },
        ThirdBlock::ClassicalGradient);
}

// |w|^2 with the classical gradient as w.
Lagrangian classical_dirichlet_lagrangian(int n, int N) {
    return Lagrangian(
        "classical-dirichlet", n, N, [](const LagrangianPoint& pt) { return sum_squares(pt.w); },
        [](const LagrangianPoint& pt, Span du, Span dv, Span dw) {
            zero(du, dv, dw);
            for (std::size_t j = 0; j < dw.size(); ++j) dw[j] = 2.0 * pt.w[j];
        },
        ThirdBlock::ClassicalGradient);
}

// sum_k u_k * sum_i w[k][i]
Lagrangian integral_coupled_lagrangian(int n, int N) {
    return Lagrangian(
        "integral-coupled", n, N,
        [n, N](const LagrangianPoint& pt) {
            double acc = 0.0;
            for (int k = 0; k < N; ++k) {
                for (int i = 0; i < n; ++i) acc += pt.u[k] * pt.w[k * n + i];
            }
            return acc;
        },
        [n, N](const LagrangianPoint& pt, Span du, Span dv, Span dw) {
            zero(du, dv, dw);
            for (int k = 0; k < N; ++k) {
                for (int i = 0; i < n; ++i) {
                    du[k] += pt.w[k * n + i];
                    dw[k * n + i] = pt.u[k];
                }
            }
        });
}

// 1/2 (rho v[k][0]^2 - k sum_{i>=1} g[k][i]^2); g is w for the classical
// wave and v for the fully fractional one. Axis 0 is time.
Lagrangian wave_lagrangian(int n, int N, const LagrangianParams& params, bool fractional_space) {
    const double rho = params.rho;
    const double stiff = params.stiffness;
    if (!(rho > 0.0) || !(stiff > 0.0)) {
        throw DomainError("wave Lagrangian: rho and stiffness must be positive");
    }
    auto eval = [n, N, rho, stiff, fractional_space](const LagrangianPoint& pt) {
        const auto& g = fractional_space ? pt.v : pt.w;
        double acc = 0.0;
        for (int k = 0; k < N; ++k) {
            acc += rho * pt.v[k * n] * pt.v[k * n];
            for (int i = 1; i < n; ++i) acc -= stiff * g[k * n + i] * g[k * n + i];
        }
        return 0.5 * acc;
    };
    auto grad = [n, N, rho, stiff, fractional_space](const LagrangianPoint& pt, Span du, Span dv, Span dw) {
        zero(du, dv, dw);
        const auto& g = fractional_space ? pt.v : pt.w;
        Span dg = fractional_space ? dv : dw;
        for (int k = 0; k < N; ++k) {
            dv[k * n] = rho * pt.v[k * n];
            for (int i = 1; i < n; ++i) dg[k * n + i] = -stiff * g[k * n + i];
        }
    };
    return Lagrangian(fractional_space ? "fractional-wave" : "wave", n, N, eval, grad,
                      fractional_space ? ThirdBlock::FractionalIntegral : ThirdBlock::ClassicalGradient);
}

}  // namespace

std::vector<std::string> builtin_lagrangian_names() {
    return {"dirichlet", "classical-dirichlet", "wave", "fractional-wave", "integral-coupled",
            "constant",  "mass",                "mixed"};
}

Lagrangian builtin_lagrangian(const std::string& name, int n, int N, const LagrangianParams& params) {
    auto make = [&]() -> Lagrangian {
        if (name == "dirichlet") return dirichlet_lagrangian(n, N);
        if (name == "classical-dirichlet") return classical_dirichlet_lagrangian(n, N);
        if (name == "wave") return wave_lagrangian(n, N, params, false);
        if (name == "fractional-wave") return wave_lagrangian(n, N, params, true);
        if (name == "integral-coupled") return integral_coupled_lagrangian(n, N);
        if (name == "constant") return constant_lagrangian(n, N);
        if (name == "mass") return mass_lagrangian(n, N);
        if (name == "mixed") return mixed_lagrangian(n, N);
        throw ConfigError("unknown Lagrangian '" + name + "'");
    };
    Lagrangian lag = make();
    validate_lagrangian(lag);
    return lag;
}

}  // namespace fracvar
