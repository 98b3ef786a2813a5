#include "fracvar/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fracvar/errors.hpp"

namespace fracvar {

ParamSet::ParamSet(double a_, double b_, double p_, double q_) : a(a_), b(b_), p(p_), q(q_) {
    if (!(a < b)) {
        throw DomainError("ParamSet: need a < b");
    }
}

ParamSet dual(const ParamSet& pset) {
    ParamSet out = pset;
    std::swap(out.p, out.q);
    return out;
}

Grid1D::Grid1D(double a, double b, int n) : a_(a), b_(b), n_(n) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
        throw DomainError("Grid1D: need finite a < b");
    }
    if (n < 2) {
        throw DomainError("Grid1D: need at least 2 cells");
    }
    if (n > kMaxCellsPerAxis) {
        throw DomainError("Grid1D: at most " + std::to_string(kMaxCellsPerAxis) + " cells per axis");
    }
    h_ = (b - a) / n;
    nodes_.resize(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) {
        nodes_[j] = a + j * h_;
    }
    nodes_[n] = b;
}

double Grid1D::weight(std::size_t j) const {
    return (j == 0 || j == static_cast<std::size_t>(n_)) ? 0.5 * h_ : h_;
}

Grid1D make_uniform_grid(double a, double b, int n) { return Grid1D(a, b, n); }

GridND::GridND(std::vector<Grid1D> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) {
        throw DomainError("GridND: need at least one axis");
    }
    strides_.assign(axes_.size(), 1);
    count_ = 1;
    for (int i = dims() - 1; i >= 0; --i) {
        strides_[i] = count_;
        count_ *= axes_[i].size();
    }
}

GridND GridND::uniform(std::span<const std::pair<double, double>> box, int n) {
    std::vector<Grid1D> axes;
    axes.reserve(box.size());
    for (const auto& [a, b] : box) {
        axes.emplace_back(a, b, n);
    }
    return GridND(std::move(axes));
}

const Grid1D& GridND::axis(int i) const {
    if (i < 0 || i >= dims()) {
        throw AxisError("axis " + std::to_string(i) + " out of range for a " + std::to_string(dims()) +
                        "-dimensional grid");
    }
    return axes_[i];
}

std::size_t GridND::line_start(int i, std::size_t line) const {
    // Split the line number into the part above axis i and the part below.
    const std::size_t inner = strides_[i];
    const std::size_t outer = line / inner;
    const std::size_t rem = line % inner;
    return outer * inner * axes_[i].size() + rem;
}

void GridND::coords(std::size_t node, std::span<double> t) const {
    for (int i = 0; i < dims(); ++i) {
        t[i] = axes_[i].node(index_along(node, i));
    }
}

std::vector<double> GridND::coords(std::size_t node) const {
    std::vector<double> t(axes_.size());
    coords(node, t);
    return t;
}

bool GridND::on_face(std::size_t node, int i) const {
    const std::size_t j = index_along(node, i);
    return j == 0 || j + 1 == axes_[i].size();
}

bool GridND::on_boundary(std::size_t node) const {
    for (int i = 0; i < dims(); ++i) {
        if (on_face(node, i)) return true;
    }
    return false;
}

double GridND::weight(std::size_t node) const {
    double w = 1.0;
    for (int i = 0; i < dims(); ++i) {
        w *= axes_[i].weight(index_along(node, i));
    }
    return w;
}

double GridND::volume() const {
    double v = 1.0;
    for (const auto& ax : axes_) v *= ax.b() - ax.a();
    return v;
}

Field::Field(GridND grid, int components) : grid_(std::move(grid)), components_(components) {
    if (components < 1) {
        throw DomainError("Field: need at least one component");
    }
    values_.assign(static_cast<std::size_t>(components) * grid_.node_count(), 0.0);
}

Field::Field(GridND grid, int components, std::vector<double> values)
    : grid_(std::move(grid)), components_(components), values_(std::move(values)) {
    if (components < 1) {
        throw DomainError("Field: need at least one component");
    }
    if (values_.size() != static_cast<std::size_t>(components) * grid_.node_count()) {
        throw LengthMismatch("Field: value array must hold components * node_count entries");
    }
}

Field Field::sample(const GridND& grid, const std::function<double(std::span<const double>)>& f) {
    Field out(grid, 1);
    std::vector<double> t(grid.dims());
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
        grid.coords(node, t);
        out.values_[node] = f(t);
    }
    return out;
}

Field Field::constant(const GridND& grid, double value, int components) {
    Field out(grid, components);
    std::fill(out.values_.begin(), out.values_.end(), value);
    return out;
}

std::span<double> Field::component(int k) {
    return std::span<double>(values_).subspan(k * node_count(), node_count());
}

std::span<const double> Field::component(int k) const {
    return std::span<const double>(values_).subspan(k * node_count(), node_count());
}

Field Field::extract(int k) const {
    if (k < 0 || k >= components_) {
        throw RangeError("Field::extract: component out of range");
    }
    auto c = component(k);
    Field out(grid_, 1, std::vector<double>(c.begin(), c.end()));
    out.flagged_axes_ = flagged_axes_;
    return out;
}

void Field::flag_axis(int axis) {
    if (std::find(flagged_axes_.begin(), flagged_axes_.end(), axis) == flagged_axes_.end()) {
        flagged_axes_.push_back(axis);
    }
}

bool Field::is_flagged(std::size_t node) const {
    for (int axis : flagged_axes_) {
        if (grid_.on_face(node, axis)) return true;
    }
    return false;
}

bool Field::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void require_same_grid(const Field& lhs, const Field& rhs, const char* where) {
    if (!(lhs.grid() == rhs.grid())) {
        throw GridMismatch(std::string(where) + ": fields live on different grids");
    }
}

Field& Field::operator+=(const Field& other) {
    require_same_grid(*this, other, "Field::operator+=");
    if (other.components_ != components_) throw LengthMismatch("Field::operator+=: component count");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    for (int a : other.flagged_axes_) flag_axis(a);
    return *this;
}

Field& Field::operator-=(const Field& other) {
    require_same_grid(*this, other, "Field::operator-=");
    if (other.components_ != components_) throw LengthMismatch("Field::operator-=: component count");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    for (int a : other.flagged_axes_) flag_axis(a);
    return *this;
}

Field& Field::operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
}

Field operator+(Field lhs, const Field& rhs) { return lhs += rhs; }
Field operator-(Field lhs, const Field& rhs) { return lhs -= rhs; }
Field operator*(double c, Field f) { return f *= c; }

Field hadamard(const Field& lhs, const Field& rhs) {
    require_same_grid(lhs, rhs, "hadamard");
    if (lhs.components() != 1 || rhs.components() != 1) {
        throw LengthMismatch("hadamard: scalar fields only");
    }
    Field out = lhs;
    for (std::size_t i = 0; i < out.node_count(); ++i) out[i] *= rhs[i];
    for (int a : rhs.flagged_axes()) out.flag_axis(a);
    return out;
}

double max_abs_interior(const Field& f) {
    double m = 0.0;
    const auto& grid = f.grid();
    for (std::size_t node = 0; node < f.node_count(); ++node) {
        if (grid.on_boundary(node)) continue;
        for (int k = 0; k < f.components(); ++k) m = std::max(m, std::abs(f(k, node)));
    }
    return m;
}

double max_abs(const Field& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace fracvar
