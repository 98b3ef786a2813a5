#pragma once

#include <functional>
#include <span>
#include <string>

#include "fracvar/core_model.hpp"
#include "fracvar/variational.hpp"

namespace fracvar {

/**
 * Linearized transformation u -> u + eps xi(t, u). The callback writes the
 * N components of xi at one node.
 */
struct SymmetryGenerator {
    using Callback = std::function<void(std::span<const double> t, std::span<const double> u, std::span<double> xi)>;

    Callback xi;
    std::string description;

    static SymmetryGenerator zero();
    static SymmetryGenerator translation(std::span<const double> c);
    static SymmetryGenerator scaling();  // xi = u
};

// xi(t, u(t)) sampled at every node; N components.
Field sample_generator(const SymmetryGenerator& gen, const Field& u);

// Second-difference heuristic: true when h^2 |d^2 xi / dt_i^2| stays below
// rel_bound * (1 + max|xi|) on every axis, i.e. no kinks or jumps at grid scale.
bool is_smooth(const Field& xi, double rel_bound = 0.25);

// sum_k ( dF/du_k xi_k + sum_i [ dF/dv[k][i] B_{P1_i} xi_k + dF/dw[k][i] K_{P2_i} xi_k ] ).
Field invariance_residual(const ProblemSpec& spec, const Field& u, const SymmetryGenerator& gen);

// f A_{P*} g + g B_P f along the axis.
Field bracket_D(const Field& f, const Field& g, const ParamSet& pset, double order, const KernelSpec& kernel,
                int axis);

// -f K_{P*} g + g K_P f along the axis.
Field bracket_I(const Field& f, const Field& g, const ParamSet& pset, double order, const KernelSpec& kernel,
                int axis);

// sum_k sum_i ( D_i[xi_k, dF/dv[k][i]] + I_i[xi_k, dF/dw[k][i]] ).
Field noether_residual(const ProblemSpec& spec, const Field& u, const SymmetryGenerator& gen);

}  // namespace fracvar
