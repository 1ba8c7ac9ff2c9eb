#include <memory>

#include <benchmark/benchmark.h>

#include "pfem/estimator.hpp"
#include "pfem/fem.hpp"
#include "pfem/problems.hpp"
#include "pfem/quadrature.hpp"

namespace {

void BM_GaussJacobiRule(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pfem::gauss_jacobi_rule(n, -0.6));
}
BENCHMARK(BM_GaussJacobiRule)->RangeMultiplier(4)->Range(4, 256);

void BM_AssembleLShape(benchmark::State& state) {
  const pfem::ParallelogramMesh m = pfem::make_lshape_mesh(4);
  const pfem::FESpace space(m, pfem::DegreeMap::uniform(m.num_elements(), static_cast<int>(state.range(0))));
  const pfem::Benchmark b = pfem::corner_cutoff();
  for (auto _ : state) benchmark::DoNotOptimize(pfem::assemble(space, b.load));
  state.counters["dofs"] = space.dofs().num_free();
}
BENCHMARK(BM_AssembleLShape)->DenseRange(2, 10, 4)->Unit(benchmark::kMillisecond);

void BM_SolveLShape(benchmark::State& state) {
  const pfem::ParallelogramMesh m = pfem::make_lshape_mesh(4);
  auto space = std::make_shared<const pfem::FESpace>(
      m, pfem::DegreeMap::uniform(m.num_elements(), static_cast<int>(state.range(0))));
  const pfem::Benchmark b = pfem::corner_cutoff();
  const pfem::LinearSystem sys = pfem::assemble(*space, b.load);
  for (auto _ : state) benchmark::DoNotOptimize(pfem::solve(space, sys));
}
BENCHMARK(BM_SolveLShape)->DenseRange(2, 10, 4)->Unit(benchmark::kMillisecond);

void BM_Estimator(benchmark::State& state) {
  const pfem::ParallelogramMesh m = pfem::make_lshape_mesh(4);
  auto space = std::make_shared<const pfem::FESpace>(
      m, pfem::DegreeMap::uniform(m.num_elements(), static_cast<int>(state.range(0))));
  const pfem::Benchmark b = pfem::corner_cutoff();
  const pfem::DiscreteSolution sol = pfem::solve_poisson(space, b.load);
  for (auto _ : state) benchmark::DoNotOptimize(pfem::compute_indicators(sol, b.load, {}));
}
BENCHMARK(BM_Estimator)->DenseRange(2, 10, 4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
