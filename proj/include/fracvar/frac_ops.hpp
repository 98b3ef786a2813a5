#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fracvar/core_model.hpp"

namespace fracvar {

enum class OpKind { K, A, B };

std::string to_string(OpKind kind);
OpKind op_kind_from_string(const std::string& name);

/**
 * A generalized fractional operator compiled for one axis of a uniform grid.
 *
 * K  product integration of the kernel against the piecewise-linear
 *    interpolant of f. Left part lower-triangular, right part upper.
 * B  product integration of k_{1-alpha} against the derivative of the
 *    piecewise-linear interpolant (L1 scheme). Both parts (n+1)x(n+1).
 * A  staggered difference of cell-averaged K^{1-alpha} samples. The cell
 *    weights (n x (n+1)) are the trapezoid-weighted transpose of the dual
 *    B plan, so on interior nodes A_{P*} is the exact discrete adjoint of
 *    B_P:  sum w f (B_P eta) = -sum w eta (A_{P*} f)  whenever eta
 *    vanishes on the boundary. Boundary values are linear extrapolations.
 *
 * Kernel cell moments are closed form for the Riemann-Liouville family and
 * 8-point Gauss-Legendre per cell otherwise.
 */
class FracOpPlan {
public:
    FracOpPlan(OpKind kind, double order, const ParamSet& pset, const KernelSpec& kernel,
               const Grid1D& grid, int axis = 0);

    OpKind kind() const { return kind_; }
    double order() const { return order_; }
    const ParamSet& pset() const { return pset_; }
    const KernelSpec& kernel() const { return kernel_; }
    const KernelSpec& integrated_kernel() const { return integrated_; }
    int axis() const { return axis_; }
    const Grid1D& grid() const { return grid_; }

    std::size_t weight_rows() const { return rows_; }
    std::size_t weight_cols() const { return cols_; }
    // Row-major weight_rows() x weight_cols(); the p-weighted left part is
    // lower-triangular and the q-weighted right part upper-triangular.
    std::span<const double> left_weights() const { return left_; }
    std::span<const double> right_weights() const { return right_; }

    std::size_t scratch_size() const { return 3 * grid_.size(); }

    void apply_line(std::span<const double> in, std::span<double> out) const;
    void apply_line(const double* in, std::size_t in_stride, double* out, std::size_t out_stride,
                    std::span<double> scratch) const;

    // out = M^T in, with M the dense operator matrix. K and B only.
    void apply_transpose_line(std::span<const double> in, std::span<double> out) const;

    // A only: the n cell samples whose staggered difference gives the
    // interior values of the operator.
    std::vector<double> cell_samples(std::span<const double> in) const;

    // (n+1)x(n+1) row-major matrix of the discrete operator on one line.
    std::vector<double> dense_matrix() const;

    // True when the plan's grid interval and the p-set interval agree.
    bool matches(const Grid1D& grid) const { return grid == grid_; }

private:
    void build_k();
    void build_b();
    void build_a();
    void compute_moments(const KernelSpec& k, std::vector<double>& m0, std::vector<double>* m1) const;
    void validate_tabulated(const KernelSpec& k) const;
    void product(const double* f, double* y) const;
    void finish_a(const double* cells, double* y) const;

    OpKind kind_;
    double order_;
    ParamSet pset_;
    KernelSpec kernel_;
    KernelSpec integrated_;
    Grid1D grid_;
    int axis_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> left_;
    std::vector<double> right_;
};

Field apply_op_1d(const FracOpPlan& plan, const Field& f);

// Applies the plan along plan.axis() to every line of every component.
// Lines are processed in parallel.
Field apply_op_nd(const FracOpPlan& plan, const Field& f);

// M^T applied along the axis (K and B plans).
Field apply_op_nd_transpose(const FracOpPlan& plan, const Field& f);

// Convenience: builds the plan for axis `axis` of f's grid and applies it.
Field apply_partial(OpKind kind, double order, const ParamSet& pset, const KernelSpec& kernel,
                    const Field& f, int axis);

namespace reference {
// Single-threaded line loop kept as the reference for the parallel kernel.
Field apply_op_nd(const FracOpPlan& plan, const Field& f);
}  // namespace reference

/**
 * Generalized fractional gradient: result[i] holds T_{P_i}^{alpha_i} applied
 * along axis i to every component of f.
 */
std::vector<Field> frac_gradient(const Field& f, OpKind kind, std::span<const ParamSet> psets,
                                 std::span<const double> orders, std::span<const KernelSpec> kernels);

// Second-order central differences, second-order one-sided at both ends.
Field finite_difference(const Field& f, int axis);
void finite_difference_line(std::span<const double> in, std::span<double> out, double h);

// Classical second difference (u_{j+1} - 2u_j + u_{j-1}) / h^2 in the
// interior, second-order one-sided four-point formula at the ends.
Field second_difference(const Field& f, int axis);

}  // namespace fracvar
