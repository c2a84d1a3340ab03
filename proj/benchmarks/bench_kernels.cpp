#include <benchmark/benchmark.h>

#include "ssg/elliptic_strip.hpp"
#include "ssg/fields.hpp"
#include "ssg/monge_ampere.hpp"
#include "ssg/nd_map.hpp"
#include "ssg/transport.hpp"

using namespace ssg;

namespace {

void BM_Transform(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TorusGrid g(n, n);
  const GridField f = to_physical(random_band_limited(g, 1, n / 4, 1.0));
  for (auto _ : state) {
    SpectralField2D s = to_spectral(f);
    benchmark::DoNotOptimize(to_physical(s));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_Transform)->Arg(64)->Arg(128)->Arg(256);

void BM_MongeAmpere(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const StripField3D phi = random_strip_field(StripGrid(TorusGrid(n, n), 17), 2, 8, 2, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(monge_ampere_apply(phi));
}
BENCHMARK(BM_MongeAmpere)->Arg(64)->Arg(128);

void BM_Poisson(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TorusGrid g(n, n);
  const StripField3D f = random_strip_field(StripGrid(g, 33), 3, 8, 2, 1.0);
  const SpectralField2D theta = random_band_limited(g, 4, 8, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_poisson(f, theta));
}
BENCHMARK(BM_Poisson)->Arg(64)->Arg(128);

void BM_NDSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SpectralField2D theta = random_band_limited(TorusGrid(n, n), 5, 4, 0.01);
  NDOptions opt;
  opt.check_ball = false;
  for (auto _ : state) benchmark::DoNotOptimize(solve_nonlinear_bvp(theta, 17, opt));
}
BENCHMARK(BM_NDSolve)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Advect(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TorusGrid g(n, n);
  VelocityTimeline tl;
  tl.add(0.0, VelocityField::from_stream_function(random_band_limited(g, 6, 4, 0.05)));
  tl.add(0.1, VelocityField::from_stream_function(random_band_limited(g, 7, 4, 0.05)));
  const SpectralField2D theta = random_band_limited(g, 8, 8, 1.0);
  for (auto _ : state) {
    const FlowMapBatch f = integrate_flow(tl, 0.1, 0.0, cfl_substeps(tl, 0.0, 0.1));
    benchmark::DoNotOptimize(advect(theta, f));
  }
}
BENCHMARK(BM_Advect)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

// the packaged benchmark_main archive is LTO bytecode from another compiler
BENCHMARK_MAIN();
