#include <benchmark/benchmark.h>

#include <numbers>

#include "maxprin/discrete_operator.hpp"
#include "maxprin/eigen_exhaustion.hpp"
#include "maxprin/symmetry_lab.hpp"
#include "maxprin/verifiers.hpp"

using namespace maxprin;

namespace {

StripDomain half_strip() {
  StripDomain d;
  d.r_min = 0.0;
  d.cross_section = CrossSection::circle_arc(std::numbers::pi);
  return d;
}

void BM_Assemble(benchmark::State& state) {
  const Grid2D grid = make_grid(half_strip(), 16.0, static_cast<double>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble(OperatorSpec{}, grid, WarpProfile::constant(1.0), 2));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}
BENCHMARK(BM_Assemble)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_DirichletSolve(benchmark::State& state) {
  const SparseOperator op =
      assemble(OperatorSpec{}, make_grid(half_strip(), 16.0, static_cast<double>(state.range(0))),
               WarpProfile::constant(1.0), 2);
  const std::vector<double> f(op.dimension(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_dirichlet(op, f));
}
BENCHMARK(BM_DirichletSolve)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_PrincipalEigenpair(benchmark::State& state) {
  const SparseOperator op =
      assemble(OperatorSpec{}, make_grid(half_strip(), 8.0, static_cast<double>(state.range(0))),
               WarpProfile::constant(1.0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(principal_eigenpair(op));
}
BENCHMARK(BM_PrincipalEigenpair)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_CapPotential(benchmark::State& state) {
  StripDomain d;
  d.cross_section = CrossSection::full_circle();
  for (auto _ : state)
    benchmark::DoNotOptimize(cap_potential(d, WarpProfile::linear(), static_cast<double>(state.range(0)),
                                           {2.0, 0.0}, 32.0));
}
BENCHMARK(BM_CapPotential)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_SemilinearNewton(benchmark::State& state) {
  AnnulusSpec spec;
  spec.r_intervals = static_cast<int>(state.range(0));
  spec.xi_nodes = 16;
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_semilinear_annulus(WarpProfile::linear(), spec, {},
                                                      Nonlinearity::allen_cahn(), 0.5, 0.5));
}
BENCHMARK(BM_SemilinearNewton)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
