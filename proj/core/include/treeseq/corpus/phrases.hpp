#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "treeseq/corpus/tree.hpp"
#include "treeseq/corpus/vocab.hpp"

namespace treeseq::corpus {

/// A constituent turned into a standalone labeled token sequence.
struct PhraseExample {
  std::vector<TokenId> tokens;
  int label = 0;
  bool is_root = false;
  std::size_t node = 0;
};

/// One example per tree node (leaves included), ordered by node id.
/// Throws ValidationError when a node has no label.
std::vector<PhraseExample> explode_phrases(const LabeledTree& tree);

/// Phrases of all trees, keeping the first occurrence of each distinct token
/// sequence. A phrase is flagged as root when any occurrence is a sentence root.
std::vector<PhraseExample> unique_phrases(std::span<const LabeledTree> trees);

/// Token ids of the clause-ending punctuation: "," "." "?" "!" (those present in the vocab).
std::vector<TokenId> default_punctuation(const Vocab& vocab);

/// Splits after every punctuation token; punctuation stays at the end of its
/// clause and concatenating the clauses reproduces the input.
std::vector<std::vector<TokenId>> segment_clauses(std::span<const TokenId> tokens,
                                                  std::span<const TokenId> punctuation);

}  // namespace treeseq::corpus
