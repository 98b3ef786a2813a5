#pragma once

#include <span>

#include "fracvar/core_model.hpp"

namespace fracvar {
class FracOpPlan;
}

namespace fracvar::kernels {

// Apply plan along plan.axis() to every line of every component of `in`.
// Lines write disjoint output regions; the parallel and serial variants
// produce bitwise identical results.
void apply_lines(const FracOpPlan& plan, const GridND& grid, int components, std::span<const double> in,
                 std::span<double> out);
void apply_lines_serial(const FracOpPlan& plan, const GridND& grid, int components,
                        std::span<const double> in, std::span<double> out);

void apply_lines_transpose(const FracOpPlan& plan, const GridND& grid, int components,
                           std::span<const double> in, std::span<double> out);

}  // namespace fracvar::kernels
