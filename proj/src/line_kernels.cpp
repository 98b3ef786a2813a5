#include "fracvar/line_kernels.hpp"

#include <vector>

#include "fracvar/frac_ops.hpp"

namespace fracvar::kernels {

namespace {

struct LineLayout {
    std::size_t lines;
    std::size_t per_component;
    std::size_t stride;
    std::size_t total;
};

LineLayout layout(const FracOpPlan& plan, const GridND& grid, int components) {
    const int axis = plan.axis();
    const std::size_t lines = grid.line_count(axis);
    return {lines, grid.node_count(), grid.stride(axis), lines * static_cast<std::size_t>(components)};
}

}  // namespace

void apply_lines(const FracOpPlan& plan, const GridND& grid, int components, std::span<const double> in,
                 std::span<double> out) {
    const LineLayout lay = layout(plan, grid, components);
    const int axis = plan.axis();
    const long long total = static_cast<long long>(lay.total);
#pragma omp parallel
    {
        std::vector<double> scratch(plan.scratch_size());
#pragma omp for schedule(static)
        for (long long job = 0; job < total; ++job) {
            const std::size_t k = static_cast<std::size_t>(job) / lay.lines;
            const std::size_t line = static_cast<std::size_t>(job) % lay.lines;
            const std::size_t start = k * lay.per_component + grid.line_start(axis, line);
            plan.apply_line(in.data() + start, lay.stride, out.data() + start, lay.stride, scratch);
        }
    }
}

void apply_lines_serial(const FracOpPlan& plan, const GridND& grid, int components,
                        std::span<const double> in, std::span<double> out) {
    const LineLayout lay = layout(plan, grid, components);
    const int axis = plan.axis();
    std::vector<double> scratch(plan.scratch_size());
    for (std::size_t job = 0; job < lay.total; ++job) {
        const std::size_t k = job / lay.lines;
        const std::size_t line = job % lay.lines;
        const std::size_t start = k * lay.per_component + grid.line_start(axis, line);
        plan.apply_line(in.data() + start, lay.stride, out.data() + start, lay.stride, scratch);
    }
}

void apply_lines_transpose(const FracOpPlan& plan, const GridND& grid, int components,
                           std::span<const double> in, std::span<double> out) {
    const LineLayout lay = layout(plan, grid, components);
    const int axis = plan.axis();
    const std::size_t np = grid.extent(axis);
    const long long total = static_cast<long long>(lay.total);
#pragma omp parallel
    {
        std::vector<double> a(np);
        std::vector<double> b(np);
#pragma omp for schedule(static)
        for (long long job = 0; job < total; ++job) {
            const std::size_t k = static_cast<std::size_t>(job) / lay.lines;
            const std::size_t line = static_cast<std::size_t>(job) % lay.lines;
            const std::size_t start = k * lay.per_component + grid.line_start(axis, line);
            for (std::size_t j = 0; j < np; ++j) a[j] = in[start + j * lay.stride];
            plan.apply_transpose_line(a, b);
            for (std::size_t j = 0; j < np; ++j) out[start + j * lay.stride] = b[j];
        }
    }
}

}  // namespace fracvar::kernels
