#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fracvar {

// Largest supported cell count per axis. Operator plans hold dense
// (n+1)x(n+1) weight matrices.
inline constexpr int kMaxCellsPerAxis = 4096;

/**
 * Weights of the left and right kernel integrals on one axis interval.
 * The evaluation point t is supplied by the operator, not stored.
 */
struct ParamSet {
    double a = 0.0;
    double b = 1.0;
    double p = 1.0;
    double q = 0.0;

    ParamSet() = default;
    ParamSet(double a_, double b_, double p_, double q_);

    static ParamSet left(double a, double b) { return {a, b, 1.0, 0.0}; }
    static ParamSet right(double a, double b) { return {a, b, 0.0, 1.0}; }

    bool operator==(const ParamSet&) const = default;
};

// Swaps the left and right weights.
ParamSet dual(const ParamSet& pset);

enum class KernelFamily { RiemannLiouville, Constant, Tabulated };

/**
 * Difference kernel k(s), s = |t - tau|.
 *
 * Operators treat a KernelSpec as a family: a Riemann-Liouville spec is
 * re-instantiated at whatever order the operator integrates (alpha for K,
 * 1 - alpha for A and B). Constant and tabulated kernels are used as given.
 */
class KernelSpec {
public:
    static KernelSpec riemann_liouville(double order);
    static KernelSpec constant();
    // samples: (s, value) pairs, s strictly increasing and positive.
    static KernelSpec tabulated(std::vector<std::pair<double, double>> samples);

    KernelFamily family() const { return family_; }
    double order() const { return order_; }
    const std::vector<std::pair<double, double>>& samples() const { return samples_; }

    // The kernel an operator integrates when it needs k of the given order.
    KernelSpec at_order(double order) const;

    double operator()(double s) const;

    std::string describe() const;

    bool operator==(const KernelSpec&) const = default;

private:
    KernelSpec(KernelFamily family, double order) : family_(family), order_(order) {}

    KernelFamily family_;
    double order_;
    double rl_scale_ = 1.0;  // 1 / Gamma(order) for the RL family
    std::vector<std::pair<double, double>> samples_;
};

double kernel_eval(const KernelSpec& kernel, double s);

// Integral of |k| over (0, length); closed form for RL and Constant,
// trapezoid over the samples for Tabulated.
double kernel_l1_norm(const KernelSpec& kernel, double length);

class Grid1D {
public:
    Grid1D(double a, double b, int n);

    double a() const { return a_; }
    double b() const { return b_; }
    int cells() const { return n_; }
    std::size_t size() const { return nodes_.size(); }
    double h() const { return h_; }
    double node(std::size_t j) const { return nodes_[j]; }
    std::span<const double> nodes() const { return nodes_; }

    // Trapezoid weights: h/2 at the ends, h inside.
    double weight(std::size_t j) const;

    bool operator==(const Grid1D& other) const {
        return a_ == other.a_ && b_ == other.b_ && n_ == other.n_;
    }

private:
    double a_;
    double b_;
    int n_;
    double h_;
    std::vector<double> nodes_;
};

Grid1D make_uniform_grid(double a, double b, int n);

/**
 * Tensor-product grid over the rectangle (a_1,b_1) x ... x (a_n,b_n).
 * Nodes are numbered row-major: axis 0 varies slowest.
 */
class GridND {
public:
    explicit GridND(std::vector<Grid1D> axes);
    explicit GridND(Grid1D axis) : GridND(std::vector<Grid1D>{std::move(axis)}) {}

    static GridND uniform(std::span<const std::pair<double, double>> box, int n);

    int dims() const { return static_cast<int>(axes_.size()); }
    const Grid1D& axis(int i) const;
    const std::vector<Grid1D>& axes() const { return axes_; }

    std::size_t node_count() const { return count_; }
    std::size_t extent(int i) const { return axes_[i].size(); }
    std::size_t stride(int i) const { return strides_[i]; }

    // Number of grid lines parallel to axis i.
    std::size_t line_count(int i) const { return count_ / extent(i); }
    // First node of the line-th line parallel to axis i.
    std::size_t line_start(int i, std::size_t line) const;

    std::size_t index_along(std::size_t node, int i) const {
        return (node / strides_[i]) % axes_[i].size();
    }
    void coords(std::size_t node, std::span<double> t) const;
    std::vector<double> coords(std::size_t node) const;

    bool on_boundary(std::size_t node) const;
    bool on_face(std::size_t node, int i) const;  // t_i = a_i or t_i = b_i

    // Product of trapezoid weights: the volume quadrature weight of a node.
    double weight(std::size_t node) const;

    double volume() const;

    bool operator==(const GridND& other) const { return axes_ == other.axes_; }

private:
    std::vector<Grid1D> axes_;
    std::vector<std::size_t> strides_;
    std::size_t count_ = 0;
};

/**
 * Sampled N-component function on a GridND. Component k occupies the
 * contiguous block [k * nodes, (k+1) * nodes).
 *
 * Operator outputs carry the set of axes whose two boundary faces hold
 * closure/extrapolated values; accuracy checks skip those nodes.
 */
class Field {
public:
    explicit Field(GridND grid, int components = 1);
    Field(GridND grid, int components, std::vector<double> values);

    // Samples f(t) on every node; scalar field.
    static Field sample(const GridND& grid, const std::function<double(std::span<const double>)>& f);
    static Field constant(const GridND& grid, double value, int components = 1);

    const GridND& grid() const { return grid_; }
    int components() const { return components_; }
    std::size_t node_count() const { return grid_.node_count(); }

    double& operator()(int k, std::size_t node) { return values_[k * node_count() + node]; }
    double operator()(int k, std::size_t node) const { return values_[k * node_count() + node]; }
    double& operator[](std::size_t node) { return values_[node]; }
    double operator[](std::size_t node) const { return values_[node]; }

    std::span<double> component(int k);
    std::span<const double> component(int k) const;
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    // Scalar field holding component k.
    Field extract(int k) const;

    void flag_axis(int axis);
    const std::vector<int>& flagged_axes() const { return flagged_axes_; }
    bool is_flagged(std::size_t node) const;

    bool all_finite() const;

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(double c);

private:
    GridND grid_;
    int components_;
    std::vector<double> values_;
    std::vector<int> flagged_axes_;
};

Field operator+(Field lhs, const Field& rhs);
Field operator-(Field lhs, const Field& rhs);
Field operator*(double c, Field f);
// Nodewise product of two scalar fields.
Field hadamard(const Field& lhs, const Field& rhs);

void require_same_grid(const Field& lhs, const Field& rhs, const char* where);

// Max |value| over nodes off the boundary, over all components.
double max_abs_interior(const Field& f);
double max_abs(const Field& f);

}  // namespace fracvar
