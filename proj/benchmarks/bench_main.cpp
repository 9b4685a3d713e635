#include <random>

#include <benchmark/benchmark.h>

#include "mlocal/inequality.hpp"
#include "mlocal/lhv.hpp"
#include "mlocal/quantum.hpp"
#include "mlocal/search.hpp"

using namespace mlocal;

namespace {

MeasurementAngles fixed_angles(int n) {
  MeasurementAngles a;
  for (int k = 0; k < n; ++k) {
    a.theta_a.push_back(0.3 + 0.1 * k);
    a.theta_b.push_back(1.7 - 0.05 * k);
  }
  return a;
}

void BM_EvaluateLhsGhz(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto expr = build_hierarchy_inequality(n, 2, 1);
  const LhsEvaluator eval(expr, NoisyState(ghz_state(n), 0.9));
  const auto angles = fixed_angles(n);
  for (auto _ : state) benchmark::DoNotOptimize(eval(angles));
}
BENCHMARK(BM_EvaluateLhsGhz)->DenseRange(4, 10, 2);

void BM_EvaluateLhsW(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto expr = build_hierarchy_inequality(n, n / 2, 1);
  const LhsEvaluator eval(expr, NoisyState(w_state(n), 0.9));
  const auto angles = fixed_angles(n);
  for (auto _ : state) benchmark::DoNotOptimize(eval(angles));
}
BENCHMARK(BM_EvaluateLhsW)->DenseRange(4, 10, 2);

void BM_MaximizeViolation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto expr = build_hierarchy_inequality(n, 2, 1);
  const NoisyState noisy(ghz_state(n), 1.0);
  OptimizerConfig config;
  config.grid_resolution = 12;
  config.restarts = 4;
  for (auto _ : state) benchmark::DoNotOptimize(maximize_violation(expr, noisy, config).max_lhs);
}
BENCHMARK(BM_MaximizeViolation)->DenseRange(4, 6, 1)->Unit(benchmark::kMillisecond);

void BM_NonsignalingVertex(benchmark::State& state) {
  std::vector<int> parties(static_cast<std::size_t>(state.range(0)));
  for (std::size_t k = 0; k < parties.size(); ++k) parties[k] = static_cast<int>(k) + 1;
  std::mt19937_64 rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(nonsignaling_vertex(parties, rng).table().data());
}
BENCHMARK(BM_NonsignalingVertex)->DenseRange(1, 3, 1)->Unit(benchmark::kMicrosecond);

void BM_ProductDistribution(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Partition partition;
  std::vector<ConditionalDistribution> blocks;
  std::mt19937_64 rng(2);
  for (int first = 1; first <= n; first += 2) {
    std::vector<int> block = {first};
    if (first + 1 <= n) block.push_back(first + 1);
    partition.blocks.push_back(block);
    blocks.push_back(sample_nonsignaling_block(block, rng));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(product_distribution(partition, blocks).table().data());
  }
}
BENCHMARK(BM_ProductDistribution)->DenseRange(4, 8, 2)->Unit(benchmark::kMicrosecond);

void BM_Certify(benchmark::State& state) {
  const auto expr = build_hierarchy_inequality(5, 3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(certify_m_local_bound(expr, 200, 9).max_lhs);
}
BENCHMARK(BM_Certify)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
