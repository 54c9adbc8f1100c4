// Serial reference vs OpenMP kernels for the Radon pair, and the two adjoints
// of the broken-ray and parallel-ray operators.

#include <benchmark/benchmark.h>

#include <random>

#include "brt/phantoms.hpp"
#include "brt/transforms.hpp"

namespace {

using namespace brt;

GridImage phantom(int n) { return render(SheppLoganSpec{{0.0, 0.0}, 0.0, 0.9}, ImageLayout{n, 1.0}); }

Sinogram noise(const SinogramLayout& l) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd(0.0, 1.0);
  Sinogram g(l);
  for (double& v : g.data) v = nd(rng);
  return g;
}

void BM_radon(benchmark::State& st) {
  const GridImage f = phantom(static_cast<int>(st.range(0)));
  const SinogramLayout sl = default_sinogram_layout(f.layout);
  for (auto _ : st) benchmark::DoNotOptimize(radon(f, sl));
}

void BM_radon_reference(benchmark::State& st) {
  const GridImage f = phantom(static_cast<int>(st.range(0)));
  const SinogramLayout sl = default_sinogram_layout(f.layout);
  for (auto _ : st) benchmark::DoNotOptimize(radon_reference(f, sl));
}

void BM_radon_adjoint(benchmark::State& st) {
  const ImageLayout il{static_cast<int>(st.range(0)), 1.0};
  const Sinogram g = noise(default_sinogram_layout(il));
  for (auto _ : st) benchmark::DoNotOptimize(radon_adjoint(g, il));
}

void BM_radon_adjoint_reference(benchmark::State& st) {
  const ImageLayout il{static_cast<int>(st.range(0)), 1.0};
  const Sinogram g = noise(default_sinogram_layout(il));
  for (auto _ : st) benchmark::DoNotOptimize(radon_adjoint_reference(g, il));
}

void BM_broken_ray_adjoint(benchmark::State& st) {
  const ImageLayout il{static_cast<int>(st.range(0)), 1.0};
  const SinogramLayout sl = default_sinogram_layout(il);
  const BrokenRayOperator op(Boundary::circle(1.0), FamilySpec::full(), il, sl);
  const Sinogram g = noise(sl);
  for (auto _ : st) benchmark::DoNotOptimize(op.adjoint(g));
}

void BM_parallel_ray_adjoint(benchmark::State& st) {
  const ImageLayout il{static_cast<int>(st.range(0)), 1.0};
  const SinogramLayout sl = default_sinogram_layout(il);
  const ParallelRayOperator op(0.6, il, sl);
  const Sinogram g = noise(sl);
  for (auto _ : st) benchmark::DoNotOptimize(op.adjoint(g));
}

void BM_lambda_filter(benchmark::State& st) {
  const ImageLayout il{static_cast<int>(st.range(0)), 1.0};
  const Sinogram g = noise(default_sinogram_layout(il));
  for (auto _ : st) benchmark::DoNotOptimize(lambda_filter(g, 1.0));
}

}  // namespace

BENCHMARK(BM_radon)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_radon_reference)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_radon_adjoint)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_radon_adjoint_reference)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_broken_ray_adjoint)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_parallel_ray_adjoint)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_lambda_filter)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
