#include <benchmark/benchmark.h>

#include "stit/mixing.hpp"
#include "stit/random.hpp"

using namespace stit;

namespace {

void beta_exact_matrix(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  RandomStream rng(15);
  std::vector<double> w(k * k);
  for (auto& x : w) x = rng.exponential(1.0);
  const auto j = JointPartitionDistribution::from_counts(k, k, w);
  for (auto _ : state) benchmark::DoNotOptimize(beta_exact(j));
}
BENCHMARK(beta_exact_matrix)->Arg(2)->Arg(6)->Arg(16);

void empirical_beta_run(benchmark::State& state) {
  EmpiricalBetaConfig cfg;
  cfg.b = static_cast<double>(state.range(0));
  cfg.replicates = 1000;
  cfg.bootstrap = 50;
  for (auto _ : state) benchmark::DoNotOptimize(empirical_beta(cfg));
}
BENCHMARK(empirical_beta_run)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
