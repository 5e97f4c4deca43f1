#include <benchmark/benchmark.h>

#include "stit/functionals.hpp"
#include "stit/random.hpp"
#include "stit/tessellation.hpp"

using namespace stit;

namespace {

// Window [-n, n]^2 at t = 1; the event count grows like n^2.
void simulate_square(benchmark::State& state) {
  const double n = static_cast<double>(state.range(0));
  SimulationConfig cfg;
  cfg.window = ConvexPolytope::box(CuboidRegion::cube(2, -n, n));
  std::uint64_t i = 0;
  std::size_t events = 0;
  for (auto _ : state) {
    cfg.seed = derive_seed(12, i++);
    const auto y = simulate(cfg);
    events += y.events.size();
    benchmark::DoNotOptimize(y);
  }
  state.counters["events"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kAvgIterations);
}
BENCHMARK(simulate_square)->RangeMultiplier(2)->Range(1, 16)->Unit(benchmark::kMicrosecond);

void simulate_cube(benchmark::State& state) {
  const double n = static_cast<double>(state.range(0));
  SimulationConfig cfg;
  cfg.window = ConvexPolytope::box(CuboidRegion::cube(3, -n, n));
  cfg.measure = HyperplaneMeasure(DirectionalDistribution::isotropic(3, 1.0));
  std::uint64_t i = 0;
  for (auto _ : state) {
    cfg.seed = derive_seed(13, i++);
    benchmark::DoNotOptimize(simulate(cfg));
  }
}
BENCHMARK(simulate_cube)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);

void evaluate_boundary_mass(benchmark::State& state) {
  SimulationConfig cfg;
  cfg.window = ConvexPolytope::box(CuboidRegion::cube(2, -8.0, 8.0));
  cfg.seed = 14;
  const auto y = simulate(cfg);
  const auto x = make_functional("boundary_mass");
  const auto v = CuboidRegion::cube(2, -4.0, 4.0);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(y, x, v));
}
BENCHMARK(evaluate_boundary_mass);

}  // namespace
