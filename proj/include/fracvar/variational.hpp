#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracvar/core_model.hpp"
#include "fracvar/frac_ops.hpp"

namespace fracvar {

// How the third argument block of F is produced.
enum class ThirdBlock {
    FractionalIntegral,  // w[k][i] = K_{P2_i}^{beta_i} u_k
    ClassicalGradient,   // w[k][i] = d u_k / d t_i (finite differences)
};

/**
 * Arguments of F at one node. v and w are component-major:
 * v[k * n + i] is the B-derivative of u_k along axis i, likewise w.
 */
struct LagrangianPoint {
    std::span<const double> t;
    std::span<const double> u;
    std::span<const double> v;
    std::span<const double> w;
};

class Lagrangian {
public:
    using Eval = std::function<double(const LagrangianPoint&)>;
    // Writes dF/du (N), dF/dv (nN) and dF/dw (nN).
    using Gradient = std::function<void(const LagrangianPoint&, std::span<double>, std::span<double>,
                                        std::span<double>)>;

    Lagrangian(std::string name, int n, int N, Eval eval, Gradient gradient,
               ThirdBlock preferred = ThirdBlock::FractionalIntegral);

    const std::string& name() const { return name_; }
    int n() const { return n_; }
    int N() const { return N_; }
    ThirdBlock preferred_block() const { return preferred_; }

    double operator()(const LagrangianPoint& pt) const { return eval_(pt); }
    void gradient(const LagrangianPoint& pt, std::span<double> du, std::span<double> dv,
                  std::span<double> dw) const {
        gradient_(pt, du, dv, dw);
    }

private:
    std::string name_;
    int n_;
    int N_;
    Eval eval_;
    Gradient gradient_;
    ThirdBlock preferred_;
};

struct GradientCheckReport {
    int trials = 0;
    double max_error = 0.0;  // max |analytic - fd| / max(1, |analytic|, |fd|)
};

// Compares the supplied partials with central differences of F at random
// arguments. Throws DomainError when any slot exceeds rel_tol.
GradientCheckReport validate_lagrangian(const Lagrangian& lag, std::uint64_t seed = 42, int trials = 20,
                                        double rel_tol = 1e-6);

struct LagrangianParams {
    double rho = 1.0;
    double stiffness = 1.0;
};

// Built-ins: dirichlet, classical-dirichlet, wave, fractional-wave,
// integral-coupled, constant, mass, mixed. Each is gradient-checked
// before it is returned. Unknown names raise ConfigError.
Lagrangian builtin_lagrangian(const std::string& name, int n, int N, const LagrangianParams& params = {});
std::vector<std::string> builtin_lagrangian_names();

// Sum of two Lagrangians with the same shape.
Lagrangian operator+(const Lagrangian& lhs, const Lagrangian& rhs);

struct ProblemSpec {
    GridND grid;
    Lagrangian lagrangian;
    std::vector<ParamSet> psets1;
    std::vector<ParamSet> psets2;
    std::vector<double> alphas;
    std::vector<double> betas;
    std::vector<KernelSpec> kernels_alpha;
    std::vector<KernelSpec> kernels_beta;
    ThirdBlock third_block = ThirdBlock::FractionalIntegral;
    // Boundary data psi; only its boundary-node values are used.
    std::optional<Field> boundary;
    double boundary_tol = 1e-12;
};

// Spec with the same p-set, order and kernel on every axis for both blocks.
ProblemSpec make_problem(const GridND& grid, const Lagrangian& lag, const ParamSet& pset, double order,
                         const KernelSpec& kernel);

void validate(const ProblemSpec& spec);

// Throws BoundaryViolation when u's trace departs from psi.
void check_admissible(const ProblemSpec& spec, const Field& u);

// Operator blocks of u: v[i] and w[i] hold all N components along axis i.
struct ArgumentBlocks {
    std::vector<Field> v;
    std::vector<Field> w;
};
ArgumentBlocks argument_blocks(const ProblemSpec& spec, const Field& u);

// Nodewise partials of F{u}: du has N components, dv[k * n + i] and
// dw[k * n + i] are scalar fields.
struct PartialFields {
    Field du;
    std::vector<Field> dv;
    std::vector<Field> dw;
};
PartialFields partial_fields(const ProblemSpec& spec, const Field& u);

double evaluate_functional(const ProblemSpec& spec, const Field& u);

// dF/du_k + sum_i [ -A_{P1*_i}(dF/dv[k][i]) + K_{P2*_i}(dF/dw[k][i]) ].
// Needs a fractional-integral third block. Boundary nodes are flagged.
Field el_residual(const ProblemSpec& spec, const Field& u);

// sum_i [ A_{P1*_i}(dF/dv[k][i]) + d/dt_i (dF/dw[k][i]) ] - dF/du_k with the
// classical gradient as third block.
Field el_residual_mixed(const ProblemSpec& spec, const Field& u);

struct OperatorSpec {
    ParamSet pset;
    double order = 0.5;
    KernelSpec kernel = KernelSpec::riemann_liouville(0.5);
};

// Axis 0 is time. Without space_ops:
//   rho A_{P*} B_P u - k sum_{i>=1} d^2 u / dt_i^2,
// otherwise the space part is sum_i A_{P*_i}(k B_{P_i} u).
Field wave_residual(const Field& u, double rho, double stiffness, const OperatorSpec& time_op,
                    const std::optional<std::vector<OperatorSpec>>& space_ops = std::nullopt);

}  // namespace fracvar
