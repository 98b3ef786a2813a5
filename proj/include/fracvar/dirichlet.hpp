#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fracvar/core_model.hpp"
#include "fracvar/errors.hpp"

namespace fracvar {

/**
 * Scalar Dirichlet problem on a rectangle: minimize
 *   E[u] = sum_i int (B_{P_i}^{alpha_i} u)^2
 * over fields whose boundary trace equals psi. The discrete energy is
 * assembled from the operator plans, so its gradient is exact.
 */
struct DirichletSpec {
    GridND grid;
    std::vector<ParamSet> psets;
    std::vector<double> alphas;
    std::vector<KernelSpec> kernels;
    Field boundary;            // psi; only boundary-node values are used
    double tol = 1e-10;        // on the max-norm of the L2 energy gradient
    int max_iter = 0;          // 0: ten times the number of unknowns
    double boundary_tol = 1e-12;
};

// Same p-set weights, order and kernel on every axis.
DirichletSpec make_dirichlet(const GridND& grid, const ParamSet& pset, double order, const KernelSpec& kernel,
                             Field boundary);

void validate(const DirichletSpec& spec);

double energy(const DirichletSpec& spec, const Field& u);

// sum_i A_{P*_i}(B_{P_i} u), boundary nodes flagged.
Field bvp_residual(const DirichletSpec& spec, const Field& u);

// W^{-1} dE/du on interior nodes (zero on the boundary). Equals
// -2 bvp_residual in the interior.
Field energy_gradient(const DirichletSpec& spec, const Field& u);

// Multilinear interpolation of psi's corner values, with psi on the boundary.
Field default_init(const DirichletSpec& spec);

struct MinimizeResult {
    Field u;
    int iterations = 0;
    double gradient_norm = 0.0;
    double energy = 0.0;
    std::vector<double> energy_history;  // energy after every iterate, starting with the init
    std::vector<std::string> warnings;
};

class NoConvergence : public Error {
public:
    NoConvergence(int max_iter, MinimizeResult best)
        : Error("minimize_energy: no convergence within " + std::to_string(max_iter) + " iterations"),
          best_(std::move(best)) {}
    const MinimizeResult& best() const { return best_; }

private:
    MinimizeResult best_;
};

// Jacobi-preconditioned conjugate gradients on the interior unknowns.
// Degenerate p-sets (p = q = 0 on every axis) return the init with a
// "DegenerateEnergy" warning.
MinimizeResult minimize_energy(const DirichletSpec& spec, const std::optional<Field>& init = std::nullopt);

// Max-node difference between the minimizers started from init1 and init2.
double uniqueness_check(const DirichletSpec& spec, const Field& init1, const Field& init2);

}  // namespace fracvar
