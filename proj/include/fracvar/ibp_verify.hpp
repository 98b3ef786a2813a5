#pragma once

#include "fracvar/core_model.hpp"

namespace fracvar {

struct IbpReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double boundary_term = 0.0;
    double residual = 0.0;      // |lhs - rhs|
    double residual_rel = 0.0;  // residual / max(|lhs|, |rhs|, 1e-14)
    int grid_n = 0;             // cells along the tested axis
    // Set when the kernel's L1 / C1 hypotheses cannot be certified
    // (tabulated kernels).
    bool unverified_hypotheses = false;
};

// Tensor-product trapezoid rule over the grid rectangle.
double volume_integral(const Field& f);

// Integral of g * nu^i over the boundary: face t_i = b_i minus face t_i = a_i.
// For a 1D grid this is g(b) - g(a).
double boundary_integral(const Field& g, int axis);

// lhs = int f K_P eta,  rhs = int eta K_{P*} f.
IbpReport check_K_duality(const Field& f, const Field& eta, const ParamSet& pset, double order,
                          const KernelSpec& kernel, int axis);

// lhs = int f B_P eta,
// rhs = boundary_integral(eta K^{1-alpha}_{P*} f) - int eta A_{P*} f.
IbpReport check_ibp(const Field& f, const Field& eta, const ParamSet& pset, double order,
                    const KernelSpec& kernel, int axis);

}  // namespace fracvar
