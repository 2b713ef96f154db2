#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treeseq/corpus/tree.hpp"
#include "treeseq/corpus/vocab.hpp"
#include "treeseq/errors.hpp"
#include "treeseq/random.hpp"

namespace treeseq::corpus {

/// A task instance as seen by models and trainers.
///
/// Sentiment: tokens (+ tree) and a class label; for treebank tree examples the
/// per-node labels live in the tree. QA: label is the gold answer id and
/// `candidates` the pool. Relations: tokens are the dependency path.
struct Example {
  std::string id;
  std::vector<TokenId> tokens;
  std::optional<LabeledTree> tree;
  int label = -1;
  std::vector<int> candidates;
  bool is_root = true;
};

/// Pang-style labeled sentence: "label <TAB> tokens [<TAB> tree]".
struct SentenceRecord {
  int label = 0;
  std::vector<TokenId> tokens;
  std::optional<LabeledTree> tree;
};

std::vector<SentenceRecord> read_sentence_file(std::istream& in, Vocab& vocab, int classes = 2);
void write_sentence_file(std::ostream& out, std::span<const SentenceRecord> items, const Vocab& vocab);

/// QA record: "question tokens <TAB> gold answer id <TAB> comma-separated pool [<TAB> tree]".
struct QARecord {
  std::vector<TokenId> tokens;
  int answer = 0;
  std::vector<int> pool;
  std::optional<LabeledTree> tree;
};

std::vector<QARecord> read_qa_file(std::istream& in, Vocab& vocab);
void write_qa_file(std::ostream& out, std::span<const QARecord> items, const Vocab& vocab);

template <class T>
struct Splits {
  std::vector<T> train;
  std::vector<T> dev;
  std::vector<T> test;
};

struct SplitCounts {
  std::size_t train = 0;
  std::size_t dev = 0;
  std::size_t test = 0;
  std::size_t total() const noexcept { return train + dev + test; }
};

/// Converts fractions summing to 1 into counts; rounding remainder goes to test.
SplitCounts counts_from_ratios(std::size_t size, double train, double dev, double test);

/// Seeded shuffle, then consecutive train/dev/test blocks of the given sizes.
template <class T>
Splits<T> split_dataset(std::vector<T> items, SplitCounts counts, std::uint64_t seed) {
  if (counts.total() > items.size()) {
    throw ValidationError("split counts (" + std::to_string(counts.total()) + ") exceed dataset size (" +
                          std::to_string(items.size()) + ")");
  }
  if (counts.total() != items.size()) {
    throw ValidationError("split counts (" + std::to_string(counts.total()) + ") do not cover dataset size (" +
                          std::to_string(items.size()) + ")");
  }
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  Splits<T> out;
  out.train.reserve(counts.train);
  out.dev.reserve(counts.dev);
  out.test.reserve(counts.test);
  for (std::size_t k = 0; k < order.size(); ++k) {
    T& item = items[order[k]];
    if (k < counts.train) {
      out.train.push_back(std::move(item));
    } else if (k < counts.train + counts.dev) {
      out.dev.push_back(std::move(item));
    } else {
      out.test.push_back(std::move(item));
    }
  }
  return out;
}

}  // namespace treeseq::corpus
