#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "gridwave/interp.hpp"

namespace {

using gridwave::GeoPoint;
using gridwave::GridSpec;
using gridwave::SplineModel;

struct Scatter {
  std::vector<GeoPoint> points;
  std::vector<double> values;
};

Scatter make_scatter(int n) {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> lon(-100.0, -80.0);
  std::uniform_real_distribution<double> lat(30.0, 45.0);
  std::uniform_real_distribution<double> val(0.0, 1.0);
  Scatter s;
  s.points.reserve(n);
  s.values.reserve(n);
  for (int k = 0; k < n; ++k) {
    s.points.push_back({lat(gen), lon(gen)});
    s.values.push_back(val(gen));
  }
  return s;
}

void BM_FitBiharmonicSpline(benchmark::State& state) {
  const Scatter s = make_scatter(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gridwave::fit_biharmonic_spline(s.points, s.values, 0.0));
  }
}
BENCHMARK(BM_FitBiharmonicSpline)->Arg(25)->Arg(50)->Arg(100)->Arg(200);

void BM_EvaluateOnGrid(benchmark::State& state) {
  const Scatter s = make_scatter(50);
  const SplineModel model = gridwave::fit_biharmonic_spline(s.points, s.values, 0.0);
  const GridSpec grid{-100, -80, 30, 45, static_cast<int>(state.range(0)),
                      static_cast<int>(state.range(0))};
  for (auto _ : state) {
    benchmark::DoNotOptimize(gridwave::evaluate_on_grid(model, grid));
  }
}
BENCHMARK(BM_EvaluateOnGrid)->Arg(61)->Arg(101);

void BM_EvaluateSpline(benchmark::State& state) {
  const Scatter s = make_scatter(static_cast<int>(state.range(0)));
  const SplineModel model = gridwave::fit_biharmonic_spline(s.points, s.values, 0.0);
  const GeoPoint at{37.2, -88.4};
  for (auto _ : state) {
    benchmark::DoNotOptimize(gridwave::evaluate_spline(model, at));
  }
}
BENCHMARK(BM_EvaluateSpline)->Arg(50)->Arg(200);

}  // namespace
