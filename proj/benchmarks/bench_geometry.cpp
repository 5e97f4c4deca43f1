#include <benchmark/benchmark.h>

#include "stit/errors.hpp"
#include "stit/geometry.hpp"
#include "stit/random.hpp"

using namespace stit;

namespace {

void split_box(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto box = ConvexPolytope::box(CuboidRegion::cube(dim, 0.0, 1.0));
  RandomStream rng(derive_seed(11, static_cast<std::uint64_t>(dim)));
  for (auto _ : state) {
    Vector u(dim);
    for (int r = 0; r < dim; ++r) u[r] = rng.normal();
    try {
      benchmark::DoNotOptimize(split(box, Hyperplane(normalized(u), dot(u, Vector(dim, 0.5)) / norm(u))));
    } catch (const DegenerateSplit&) {
    }
  }
}
BENCHMARK(split_box)->Arg(2)->Arg(3);

void polytope_volume(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto box = ConvexPolytope::box(CuboidRegion::cube(dim, 0.0, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(box.translated(Vector(dim, 0.25)).volume());
}
BENCHMARK(polytope_volume)->Arg(2)->Arg(3);

}  // namespace
