#include <benchmark/benchmark.h>

#include "gridwave/inertia.hpp"
#include "gridwave/sim.hpp"

namespace {

using gridwave::GridSpec;
using gridwave::ScalarField;
using gridwave::SimScenario;

SimScenario scenario(int n) {
  SimScenario s;
  s.grid = {-84.0, -80.0, 33.0, 37.0, n, n};
  s.h_field = gridwave::uniform_h_field(s.grid, 1.0);
  s.params.z_mag_pu = 0.5;
  s.params.distance_base_km = 200.0;
  s.source.location = {35.0, -82.0};
  s.source.sigma_deg = s.grid.dlat();
  s.source.sigma_t_s = 0.1;
  s.source.t_center_s = 0.5;
  s.source.amplitude_rad = -16.0;
  s.probes = {{"Q0", 36.0, -81.0}};
  s.duration_s = 2.0;
  s.sample_dt_s = 0.05;
  return s;
}

void BM_Simulate(benchmark::State& state) {
  const SimScenario s = scenario(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gridwave::simulate(s));
  }
}
BENCHMARK(BM_Simulate)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_GradientSpeedInertia(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GridSpec grid{-100, -80, 30, 45, n, n};
  ScalarField tdoa(grid);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      tdoa.at(i, j) = 0.002 * grid.lon_at(j) + 0.001 * grid.lat_at(i);
    }
  }
  const gridwave::ContinuumParams params;
  for (auto _ : state) {
    const auto grad = gridwave::gradient_field(tdoa);
    const auto speed = gridwave::speed_field(grad);
    benchmark::DoNotOptimize(gridwave::inertia_from_speed(speed, params));
  }
}
BENCHMARK(BM_GradientSpeedInertia)->Arg(101)->Arg(201);

}  // namespace

// The distro's libbenchmark_main.a carries incompatible LTO bytecode on
// some toolchains; expand the main here instead.
BENCHMARK_MAIN();
