#include <benchmark/benchmark.h>

#include <elastinv/elastinv.hpp>

using namespace elastinv;

namespace {

const Medium kMed(2.0, 1.0, 3.0);

void BM_SphHarmonicsAll(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sph_harmonics_all(N, 0.7, 1.9));
}
BENCHMARK(BM_SphHarmonicsAll)->Arg(10)->Arg(30);

void BM_ZLogDerivative(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(z_log_derivative_all(60, 4.5));
}
BENCHMARK(BM_ZLogDerivative);

void BM_DtnMatrices(benchmark::State& state) {
  for (auto _ : state) {
    for (int n = 0; n <= 30; ++n) benchmark::DoNotOptimize(dtn_matrix_M(kMed, 1.0, n));
  }
}
BENCHMARK(BM_DtnMatrices);

void BM_SolverSetup(benchmark::State& state) {
  const Surface s(ellipsoid_param(0.6, 0.75, 0.9, 1));
  SolverOptions opt;
  opt.order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ExteriorDirichletSolver(s, kMed, 1.0, opt));
}
BENCHMARK(BM_SolverSetup)->Arg(10)->Arg(17)->Unit(benchmark::kMillisecond);

void BM_ObjectiveAndGradient(benchmark::State& state) {
  const SolverOptions opt{.order = 8};
  const auto pts = fibonacci_sphere(50, 1.0);
  const Medium med = kMed.at_frequency(1.0);
  const std::vector<MeasurementSet> data{
      scattering_operator(ellipsoid_param(0.6, 0.75, 0.9, 1),
                          IncidentWave::compressional(Vec3(0.0, 1.0, 0.0)), med, 1.0, pts, opt)};
  const SurfaceParam C = initial_guess(0.5, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(objective_and_gradient(C, data, opt));
}
BENCHMARK(BM_ObjectiveAndGradient)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
