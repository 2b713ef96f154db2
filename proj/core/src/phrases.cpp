#include "treeseq/corpus/phrases.hpp"

#include <algorithm>
#include <map>

#include "treeseq/errors.hpp"

namespace treeseq::corpus {

std::vector<PhraseExample> explode_phrases(const LabeledTree& tree) {
  const std::vector<TokenId> tokens = tree.tokens();
  std::vector<PhraseExample> out;
  out.reserve(tree.size());
  for (std::size_t id = 0; id < tree.size(); ++id) {
    const TreeNode& n = tree.node(id);
    if (!n.label) throw ValidationError("tree node " + std::to_string(id) + " has no label");
    PhraseExample p;
    p.tokens.assign(tokens.begin() + static_cast<std::ptrdiff_t>(n.span.begin),
                    tokens.begin() + static_cast<std::ptrdiff_t>(n.span.end));
    p.label = *n.label;
    p.is_root = id == tree.root();
    p.node = id;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PhraseExample> unique_phrases(std::span<const LabeledTree> trees) {
  std::vector<PhraseExample> out;
  std::map<std::vector<TokenId>, std::size_t> seen;
  for (const auto& tree : trees) {
    for (auto& p : explode_phrases(tree)) {
      const auto [it, inserted] = seen.try_emplace(p.tokens, out.size());
      if (inserted) {
        out.push_back(std::move(p));
      } else if (p.is_root) {
        out[it->second].is_root = true;
      }
    }
  }
  return out;
}

std::vector<TokenId> default_punctuation(const Vocab& vocab) {
  std::vector<TokenId> out;
  for (const char* p : {",", ".", "?", "!"}) {
    if (auto id = vocab.find(p)) out.push_back(*id);
  }
  return out;
}

std::vector<std::vector<TokenId>> segment_clauses(std::span<const TokenId> tokens,
                                                  std::span<const TokenId> punctuation) {
  std::vector<std::vector<TokenId>> clauses;
  std::vector<TokenId> current;
  for (const TokenId t : tokens) {
    current.push_back(t);
    if (std::find(punctuation.begin(), punctuation.end(), t) != punctuation.end()) {
      clauses.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) clauses.push_back(std::move(current));
  return clauses;
}

}  // namespace treeseq::corpus
