#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treeseq/corpus/vocab.hpp"

namespace treeseq::corpus {

/// Half-open token range [begin, end).
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(Span, Span) = default;
};

struct TreeNode {
  std::optional<int> label;
  TokenId token = Vocab::kUnk;  // leaves only
  int left = -1;
  int right = -1;
  Span span;

  bool is_leaf() const noexcept { return left < 0; }
};

/// Strictly binary tree stored in post-order: children precede parents and the
/// root is the last node. Node indices double as node ids.
class LabeledTree {
 public:
  class Builder {
   public:
    std::size_t leaf(TokenId token, std::optional<int> label = std::nullopt);
    std::size_t internal(std::size_t left, std::size_t right, std::optional<int> label = std::nullopt);
    /// The last node added becomes the root; every other node must have one parent.
    LabeledTree build() &&;

   private:
    std::vector<TreeNode> nodes_;
  };

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  const TreeNode& node(std::size_t id) const { return nodes_.at(id); }
  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t root() const noexcept { return nodes_.size() - 1; }
  std::size_t leaf_count() const noexcept { return nodes_.back().span.size(); }
  /// Leaf tokens left to right.
  std::vector<TokenId> tokens() const;
  /// Node id of the leaf covering token position `position`.
  std::size_t leaf_at(std::size_t position) const;
  /// Number of internal ancestors above a node.
  std::size_t depth(std::size_t id) const;
  std::optional<std::size_t> parent(std::size_t id) const;

 private:
  explicit LabeledTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}
  std::vector<TreeNode> nodes_;
};

struct TreeParseOptions {
  /// Require an integer label in [0, max_label] on every constituent; otherwise
  /// constituent labels are ignored (e.g. PTB categories).
  bool sentiment_labels = true;
  int max_label = 4;
};

/// Parses one bracketed tree. Unary chains collapse onto their upper node and
/// n-ary nodes are left-binarized; intermediate nodes carry no label.
LabeledTree parse_tree(std::string_view text, Vocab& vocab, const TreeParseOptions& options = {},
                       std::size_t line_number = 0);

/// One tree per nonblank line; errors carry the line number.
std::vector<LabeledTree> parse_sexpr_treebank(std::istream& in, Vocab& vocab,
                                              const TreeParseOptions& options = {});

/// Inverse of parse_tree for binary trees: "(3 (2 the) (4 food))". Unlabeled
/// nodes are written with the placeholder label "X".
std::string to_sexpr(const LabeledTree& tree, const Vocab& vocab);

/// ((w1 w2) w3) ... with the given label on every node.
LabeledTree left_branching_tree(std::span<const TokenId> tokens, std::optional<int> label = std::nullopt);
/// (w1 (w2 (w3 ...)))
LabeledTree right_branching_tree(std::span<const TokenId> tokens, std::optional<int> label = std::nullopt);

}  // namespace treeseq::corpus
