#include <benchmark/benchmark.h>

#include "treeseq/eval/metrics.hpp"
#include "treeseq/random.hpp"

namespace {

using namespace treeseq;

std::vector<task::Prediction> system(std::size_t n, double accuracy, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<task::Prediction> out;
  for (std::size_t i = 0; i < n; ++i) {
    const int gold = static_cast<int>(rng.below(5));
    const int predicted = rng.uniform() < accuracy ? gold : (gold + 1) % 5;
    out.push_back({"s" + std::to_string(i), gold, predicted, {}});
  }
  return out;
}

void BM_PairedBootstrap(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto resamples = static_cast<std::size_t>(state.range(1));
  const auto a = system(n, 0.45, 1);
  const auto b = system(n, 0.42, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval::bootstrap_test(a, b, eval::Filter::all, resamples, 0));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(resamples));
}

}  // namespace

BENCHMARK(BM_PairedBootstrap)->Args({2210, 1000})->Args({2210, 10000})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
