#include <benchmark/benchmark.h>

#include <random>

#include "bklab/dyadic.hpp"
#include "bklab/kernel.hpp"
#include "bklab/verify.hpp"

using namespace bklab;

static void BM_OmegaQ(benchmark::State& state) {
  const double q = static_cast<double>(state.range(0)) / 10.0;
  double z = 1.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(omega_q(z, q));
    z = z > 100.0 ? 1.5 : z * 1.01;
  }
}
BENCHMARK(BM_OmegaQ)->Arg(2)->Arg(5)->Arg(8);

static void BM_MaximalFunction(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto phi = random_step_function(rng, 2, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(maximal_function(phi));
}
BENCHMARK(BM_MaximalFunction)->DenseRange(6, 12, 3);

static void BM_DenseObjective(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  const auto leaves = random_step_function(rng, 2, depth).leaf_values(depth);
  DenseMaximal dense(2, depth);
  for (auto _ : state) benchmark::DoNotOptimize(dense.objective(leaves, 1.2, 0.5));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(leaves.size()));
}
BENCHMARK(BM_DenseObjective)->DenseRange(6, 12, 2);

static void BM_LinearizeRational(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto phi = random_rational_function(rng, 2, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(linearize(phi));
}
BENCHMARK(BM_LinearizeRational)->Arg(5)->Arg(8);
BENCHMARK_MAIN();
