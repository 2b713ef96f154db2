#include "treeseq/task/examples.hpp"

#include <string>

#include "treeseq/corpus/phrases.hpp"
#include "treeseq/errors.hpp"

namespace treeseq::task {

namespace {

std::string make_id(std::string_view prefix, std::size_t index) { return std::string(prefix) + std::to_string(index); }

}  // namespace

std::vector<Example> treebank_examples(std::span<const corpus::LabeledTree> trees, std::string_view prefix) {
  std::vector<Example> out;
  out.reserve(trees.size());
  for (std::size_t i = 0; i < trees.size(); ++i) {
    const auto& tree = trees[i];
    const auto label = tree.node(tree.root()).label;
    if (!label) throw ValidationError("treebank sentence " + std::to_string(i + 1) + " has an unlabeled root");
    Example ex;
    ex.id = make_id(prefix, i);
    ex.tokens = tree.tokens();
    ex.tree = tree;
    ex.label = *label;
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<Example> treebank_phrase_examples(std::span<const corpus::LabeledTree> trees, std::string_view prefix) {
  std::vector<Example> out;
  for (auto& phrase : corpus::unique_phrases(trees)) {
    Example ex;
    ex.id = make_id(prefix, out.size());
    ex.tokens = std::move(phrase.tokens);
    ex.label = phrase.label;
    ex.is_root = phrase.is_root;
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<Example> sentence_examples(std::span<const corpus::SentenceRecord> records, std::string_view prefix) {
  std::vector<Example> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    Example ex;
    ex.id = make_id(prefix, i);
    ex.tokens = records[i].tokens;
    ex.tree = records[i].tree;
    ex.label = records[i].label;
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<Example> qa_examples(std::span<const corpus::QARecord> records, std::string_view prefix) {
  std::vector<Example> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    Example ex;
    ex.id = make_id(prefix, i);
    ex.tokens = records[i].tokens;
    ex.tree = records[i].tree;
    ex.label = records[i].answer;
    ex.candidates = records[i].pool;
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<Example> relation_examples(std::span<const corpus::RelationInstance> instances, std::string_view prefix) {
  std::vector<Example> out;
  out.reserve(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    Example ex;
    ex.id = instances[i].id.empty() ? make_id(prefix, i) : instances[i].id;
    ex.tokens = corpus::dependency_path(instances[i].graph);
    ex.tree = corpus::path_tree(instances[i].graph);
    ex.label = instances[i].relation;
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace treeseq::task
