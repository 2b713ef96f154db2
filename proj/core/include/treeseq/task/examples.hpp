#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "treeseq/corpus/datasets.hpp"
#include "treeseq/corpus/dependency.hpp"
#include "treeseq/corpus/tree.hpp"

namespace treeseq::task {

using corpus::Example;

/// One example per sentence, carrying its labeled tree; ids are "<prefix><index>".
/// Throws ValidationError when a root is unlabeled.
std::vector<Example> treebank_examples(std::span<const corpus::LabeledTree> trees, std::string_view prefix);

/// One tree-less example per distinct phrase, for training sequence models on
/// the phrase-level treebank.
std::vector<Example> treebank_phrase_examples(std::span<const corpus::LabeledTree> trees, std::string_view prefix);

std::vector<Example> sentence_examples(std::span<const corpus::SentenceRecord> records, std::string_view prefix);

std::vector<Example> qa_examples(std::span<const corpus::QARecord> records, std::string_view prefix);

/// Tokens are the dependency path and the tree is its path tree.
std::vector<Example> relation_examples(std::span<const corpus::RelationInstance> instances, std::string_view prefix);

}  // namespace treeseq::task
