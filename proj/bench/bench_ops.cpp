#include <benchmark/benchmark.h>
#include <omp.h>

#include <cmath>
#include <vector>

#include "fracvar/dirichlet.hpp"
#include "fracvar/frac_ops.hpp"

using namespace fracvar;

namespace {

GridND square(int n) {
    const std::vector<std::pair<double, double>> box(2, {0.0, 1.0});
    return GridND::uniform(box, n);
}

Field sample(const GridND& g) {
    return Field::sample(g, [](std::span<const double> t) { return std::sin(3.0 * t[0]) * std::cos(2.0 * t[1]); });
}

const ParamSet kMixed(0, 1, 0.7, 0.3);

void BM_PlanAssembly(benchmark::State& state) {
    const Grid1D axis = make_uniform_grid(0.0, 1.0, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        FracOpPlan plan(OpKind::B, 0.5, kMixed, KernelSpec::riemann_liouville(0.5), axis);
        benchmark::DoNotOptimize(plan);
    }
}
BENCHMARK(BM_PlanAssembly)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);

void BM_ApplySerial(benchmark::State& state) {
    const GridND g = square(static_cast<int>(state.range(0)));
    const FracOpPlan plan(OpKind::B, 0.5, kMixed, KernelSpec::riemann_liouville(0.5), g.axis(1), 1);
    const Field f = sample(g);
    for (auto _ : state) benchmark::DoNotOptimize(reference::apply_op_nd(plan, f));
}
BENCHMARK(BM_ApplySerial)->RangeMultiplier(2)->Range(128, 512)->Unit(benchmark::kMillisecond);

void BM_ApplyParallel(benchmark::State& state) {
    omp_set_num_threads(static_cast<int>(state.range(1)));
    const GridND g = square(static_cast<int>(state.range(0)));
    const FracOpPlan plan(OpKind::B, 0.5, kMixed, KernelSpec::riemann_liouville(0.5), g.axis(1), 1);
    const Field f = sample(g);
    for (auto _ : state) benchmark::DoNotOptimize(apply_op_nd(plan, f));
    state.counters["threads"] = static_cast<double>(state.range(1));
}
BENCHMARK(BM_ApplyParallel)
    ->ArgsProduct({{128, 256, 512}, {1, 2, 4, 8}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

void BM_MinimizeEnergy(benchmark::State& state) {
    const GridND g = square(static_cast<int>(state.range(0)));
    const DirichletSpec spec =
        make_dirichlet(g, ParamSet(0, 1, 1, 0), 0.5, KernelSpec::riemann_liouville(0.5), sample(g));
    for (auto _ : state) benchmark::DoNotOptimize(minimize_energy(spec));
}
BENCHMARK(BM_MinimizeEnergy)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
