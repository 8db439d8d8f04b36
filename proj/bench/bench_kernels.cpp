// Serial against OpenMP-parallel timings of the assembly kernels and of one
// elastic-plastic solve (dominated by the finite-difference Jacobian).

#include "torsolve/bem.hpp"
#include "torsolve/geometry.hpp"
#include "torsolve/kernels.hpp"
#include "torsolve/plasticity.hpp"

#include <benchmark/benchmark.h>

using namespace torsolve;

namespace {

Execution mode(const benchmark::State& state) {
    return state.range(1) != 0 ? Execution::parallel : Execution::serial;
}

void BM_BoundaryKernels(benchmark::State& state) {
    const BoundaryMesh mesh = discretize_boundary(SectionShape::rectangle(5, 10), static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(boundary_kernels(mesh, mode(state)));
    state.SetLabel(mode(state) == Execution::parallel ? "parallel" : "serial");
}

void BM_FieldKernels(benchmark::State& state) {
    const auto shape = SectionShape::rectangle(5, 10);
    const BoundaryMesh mesh = discretize_boundary(shape, static_cast<int>(state.range(0)));
    const CollocationSet col = generate_collocation(shape, 450, 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(field_kernels(mesh, col.points, mode(state)));
    state.SetLabel(mode(state) == Execution::parallel ? "parallel" : "serial");
}

void BM_PlasticSolve(benchmark::State& state) {
    DiscretizationOptions d;
    d.boundary_elements = 200;
    d.collocation_target = static_cast<int>(state.range(0));
    const TorsionModel model(SectionShape::rectangle(5, 10), BilinearCurve{210600, 0.3, 24, 0}, d);
    SolverOptions opt;
    opt.exec = mode(state);
    const double theta = 1.5 * model.first_yield().theta;
    for (auto _ : state) benchmark::DoNotOptimize(model.solve(theta, opt));
    state.SetLabel(mode(state) == Execution::parallel ? "parallel" : "serial");
}

}  // namespace

BENCHMARK(BM_BoundaryKernels)->ArgsProduct({{300, 1000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FieldKernels)->ArgsProduct({{300}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PlasticSolve)->ArgsProduct({{100, 200}, {0, 1}})->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
