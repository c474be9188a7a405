#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "heatext/gaussian.hpp"
#include "heatext/profile.hpp"
#include "heatext/solver.hpp"
#include "heatext/tridiagonal.hpp"

using namespace heatext;

static void BM_TridiagonalSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const TridiagonalSolver solver(std::vector<double>(n, -1.0), std::vector<double>(n, 4.0), std::vector<double>(n, -1.0));
  std::vector<double> rhs(n, 1.0);
  for (auto _ : state) {
    solver.solve_in_place(rhs);
    benchmark::DoNotOptimize(rhs.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}
BENCHMARK(BM_TridiagonalSolve)->Range(1 << 10, 1 << 16);

// One unit of time on the default exterior grid, h = 1/64, dt = 1/128.
static void BM_RadialEvolveUnitTime(benchmark::State& state) {
  const ExteriorDomain domain(3, BallHole{1.0}, 121.0);
  const auto grid = Grid::radial(3, 1.0, 121.0, 7680);
  const Field u0 = make_field(grid, [](double r, double) { return std::exp(-(r - 3.0) * (r - 3.0)); });
  StepperConfig cfg;
  cfg.snapshot_times = {1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(evolve_radial(domain, ThetaBoundary(0.5), u0, cfg));
  }
}
BENCHMARK(BM_RadialEvolveUnitTime)->Unit(benchmark::kMillisecond);

static void BM_PlanarEvolve(benchmark::State& state) {
  const int cells = static_cast<int>(state.range(0));
  const HoleSpec hole = RectHole{1.0, 1.0};
  const auto grid = Grid::planar(16.0, cells, [hole](double x, double y) { return hole_contains(hole, x, y); });
  const Field u0 = make_field(grid, [](double x, double y) { return std::exp(-((x - 3) * (x - 3) + y * y)); });
  StepperConfig cfg;
  cfg.dt = 0.125;
  cfg.snapshot_times = {1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(evolve_planar(ThetaBoundary(0.5), u0, cfg));
  }
}
BENCHMARK(BM_PlanarEvolve)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_GaussianBallMass(benchmark::State& state) {
  double d = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gaussian_ball_mass_3d(3.0 + d, 1.0, 10.0));
    d += 1e-9;
  }
}
BENCHMARK(BM_GaussianBallMass);

static void BM_ClosedFormProfile(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(profile_radial_closed_form(3, 1.0, ThetaBoundary(0.5)));
  }
}
BENCHMARK(BM_ClosedFormProfile);

BENCHMARK_MAIN();
