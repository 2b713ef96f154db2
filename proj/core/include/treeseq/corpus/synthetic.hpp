#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "treeseq/corpus/datasets.hpp"
#include "treeseq/corpus/dependency.hpp"
#include "treeseq/corpus/tree.hpp"
#include "treeseq/random.hpp"

namespace treeseq::corpus {

/// Uniformly random bracketing over the given leaves (unlabeled).
LabeledTree random_binary_tree(std::span<const TokenId> tokens, Rng& rng);

/// Small sentiment treebank in s-expression form. Words carry a polarity,
/// "not" flips the polarity of its sibling, labels follow the summed
/// polarity, and clauses are separated by "," or ".". Every node is labeled 0-4.
std::vector<std::string> synthetic_treebank_lines(std::size_t sentences, std::uint64_t seed);

/// Sentences whose class is fixed by a single class-marker word among random
/// filler words; separable by construction. Trees are random bracketings.
std::vector<SentenceRecord> separable_sentences(std::size_t count, int classes, Vocab& vocab, std::uint64_t seed);

/// QA instances: the answer is signalled by one cue word in the question.
std::vector<QARecord> synthetic_qa(std::size_t count, std::size_t answers, std::size_t pool, Vocab& vocab,
                                   std::uint64_t seed);

/// Random dependency trees whose relation is spelled by the e1 token itself.
std::vector<RelationInstance> synthetic_relations(std::size_t count, Vocab& vocab, std::uint64_t seed);

/// Random dependency tree over n tokens (heads only; tokens/entities unset).
std::vector<std::size_t> random_heads(std::size_t n, Rng& rng);

}  // namespace treeseq::corpus
