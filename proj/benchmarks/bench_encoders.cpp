#include <benchmark/benchmark.h>

#include "treeseq/corpus/embeddings.hpp"
#include "treeseq/corpus/phrases.hpp"
#include "treeseq/corpus/synthetic.hpp"
#include "treeseq/task/task_model.hpp"

namespace {

using namespace treeseq;

// Forward and backward pass of one sentence-level loss, at range(1) tokens and K = range(2).
void BM_LossAndGradient(benchmark::State& state) {
  const auto kind = model::all_model_kinds()[static_cast<std::size_t>(state.range(0))];
  const auto length = static_cast<std::size_t>(state.range(1));
  const auto dim = static_cast<std::size_t>(state.range(2));
  state.SetLabel(std::string(model::model_name(kind)));

  corpus::Vocab vocab;
  Rng rng(7);
  corpus::Example ex;
  ex.id = "bench";
  for (std::size_t i = 0; i < length; ++i) {
    ex.tokens.push_back(vocab.intern(i % 6 == 5 ? "," : "w" + std::to_string(rng.below(40))));
  }
  ex.tree = corpus::random_binary_tree(ex.tokens, rng);
  ex.label = 1;

  task::TaskOptions options;
  options.kind = task::TaskKind::pang_sentiment;
  options.classes = 2;
  options.model.kind = kind;
  options.model.dim = dim;
  options.model.punctuation = corpus::default_punctuation(vocab);
  const task::TaskModel model(options);
  const auto params = model.init_params(corpus::random_embeddings(vocab.size(), dim, 7), rng);

  for (auto _ : state) {
    ad::Graph g;
    Rng sampler(1);
    const auto loss = model.loss(g, params, ex, sampler);
    ad::ParamSet grads = params.zeros_like();
    g.backward(loss, grads);
    benchmark::DoNotOptimize(grads);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(length));
}

void Args(benchmark::internal::Benchmark* b) {
  for (int kind = 0; kind < 7; ++kind) b->Args({kind, 20, 50});
  b->Args({1, 60, 50})->Args({5, 60, 50});
}

}  // namespace

BENCHMARK(BM_LossAndGradient)->Apply(Args)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
