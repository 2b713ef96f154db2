#include "treeseq/corpus/tree.hpp"

#include <algorithm>
#include <charconv>
#include <istream>

#include "treeseq/errors.hpp"

namespace treeseq::corpus {

std::size_t LabeledTree::Builder::leaf(TokenId token, std::optional<int> label) {
  TreeNode n;
  n.token = token;
  n.label = label;
  nodes_.push_back(n);
  return nodes_.size() - 1;
}

std::size_t LabeledTree::Builder::internal(std::size_t left, std::size_t right, std::optional<int> label) {
  if (left >= nodes_.size() || right >= nodes_.size() || left == right) {
    throw ValidationError("internal node children must be distinct existing nodes");
  }
  TreeNode n;
  n.left = static_cast<int>(left);
  n.right = static_cast<int>(right);
  n.label = label;
  nodes_.push_back(n);
  return nodes_.size() - 1;
}

namespace {

std::size_t assign_spans(std::vector<TreeNode>& nodes, std::size_t id, std::size_t begin) {
  TreeNode& n = nodes[id];
  if (n.is_leaf()) {
    n.span = {begin, begin + 1};
    return begin + 1;
  }
  const std::size_t mid = assign_spans(nodes, static_cast<std::size_t>(n.left), begin);
  const std::size_t end = assign_spans(nodes, static_cast<std::size_t>(n.right), mid);
  nodes[id].span = {begin, end};
  return end;
}

}  // namespace

LabeledTree LabeledTree::Builder::build() && {
  if (nodes_.empty()) throw ValidationError("tree has no nodes");
  std::vector<int> parents(nodes_.size(), 0);
  for (const auto& n : nodes_) {
    if (n.is_leaf()) continue;
    ++parents[static_cast<std::size_t>(n.left)];
    ++parents[static_cast<std::size_t>(n.right)];
  }
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
    if (parents[i] != 1) throw ValidationError("tree node " + std::to_string(i) + " must have exactly one parent");
  }
  if (parents.back() != 0) throw ValidationError("root must be the last node");
  assign_spans(nodes_, nodes_.size() - 1, 0);
  return LabeledTree(std::move(nodes_));
}

std::vector<TokenId> LabeledTree::tokens() const {
  std::vector<TokenId> out(leaf_count());
  for (const auto& n : nodes_) {
    if (n.is_leaf()) out[n.span.begin] = n.token;
  }
  return out;
}

std::size_t LabeledTree::leaf_at(std::size_t position) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].is_leaf() && nodes_[i].span.begin == position) return i;
  }
  throw ValidationError("token position " + std::to_string(position) + " outside tree of " +
                        std::to_string(leaf_count()) + " leaves");
}

std::optional<std::size_t> LabeledTree::parent(std::size_t id) const {
  for (std::size_t i = id + 1; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (!n.is_leaf() && (static_cast<std::size_t>(n.left) == id || static_cast<std::size_t>(n.right) == id)) {
      return i;
    }
  }
  return std::nullopt;
}

std::size_t LabeledTree::depth(std::size_t id) const {
  std::size_t d = 0;
  for (auto p = parent(id); p; p = parent(*p)) ++d;
  return d;
}

namespace {

struct RawNode {
  std::optional<std::string> label;
  std::optional<std::string> word;  // preterminal or bare atom
  std::vector<RawNode> children;
};

class SexprReader {
 public:
  SexprReader(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  RawNode read_root() {
    skip_space();
    if (at_end()) throw ParseError("empty tree", line_);
    if (text_[pos_] != '(') throw ParseError("tree must start with '('", line_);
    RawNode root = read_node();
    skip_space();
    if (!at_end()) throw ParseError("unexpected text after tree: '" + std::string(text_.substr(pos_)) + "'", line_);
    return root;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }

  void skip_space() {
    while (!at_end() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r' || text_[pos_] == '\n')) {
      ++pos_;
    }
  }

  std::string read_atom() {
    const std::size_t start = pos_;
    while (!at_end() && text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != ' ' && text_[pos_] != '\t' &&
           text_[pos_] != '\r' && text_[pos_] != '\n') {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  RawNode read_node() {
    ++pos_;  // '('
    RawNode node;
    skip_space();
    if (at_end()) throw ParseError("unbalanced parentheses: missing ')'", line_);
    if (text_[pos_] == ')') throw ParseError("empty constituent '()'", line_);
    if (text_[pos_] != '(') node.label = read_atom();

    std::vector<std::string> atoms;
    while (true) {
      skip_space();
      if (at_end()) throw ParseError("unbalanced parentheses: missing ')'", line_);
      const char c = text_[pos_];
      if (c == ')') {
        ++pos_;
        break;
      }
      if (c == '(') {
        node.children.push_back(read_node());
      } else {
        RawNode atom;
        atom.word = read_atom();
        node.children.push_back(std::move(atom));
      }
    }
    if (node.children.empty()) {
      throw ParseError("empty constituent '(" + node.label.value_or("") + ")'", line_);
    }
    if (node.children.size() == 1 && node.children[0].word && !node.children[0].label) {
      node.word = std::move(node.children[0].word);
      node.children.clear();
    }
    return node;
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

class TreeConverter {
 public:
  TreeConverter(Vocab& vocab, const TreeParseOptions& options, std::size_t line)
      : vocab_(vocab), options_(options), line_(line) {}

  std::size_t convert(const RawNode& raw, std::optional<int> override_label = std::nullopt) {
    const std::optional<int> own = label_of(raw);
    const std::optional<int> label = override_label ? override_label : own;
    if (raw.word) return builder_.leaf(vocab_.intern(*raw.word), label);
    if (raw.children.size() == 1) return convert(raw.children[0], label);
    std::size_t acc = convert(raw.children[0]);
    for (std::size_t i = 1; i < raw.children.size(); ++i) {
      const std::size_t next = convert(raw.children[i]);
      acc = builder_.internal(acc, next, i + 1 == raw.children.size() ? label : std::nullopt);
    }
    return acc;
  }

  LabeledTree finish() && { return std::move(builder_).build(); }

 private:
  std::optional<int> label_of(const RawNode& raw) const {
    if (!options_.sentiment_labels) return std::nullopt;
    if (!raw.label) {
      throw ParseError(raw.word ? "unlabeled leaf '" + *raw.word + "'" : std::string("unlabeled constituent"), line_);
    }
    const std::string& text = *raw.label;
    int value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw ParseError("non-integer label '" + text + "'", line_);
    }
    if (value < 0 || value > options_.max_label) {
      throw ParseError("label " + text + " outside [0, " + std::to_string(options_.max_label) + "]", line_);
    }
    return value;
  }

  Vocab& vocab_;
  const TreeParseOptions& options_;
  std::size_t line_;
  LabeledTree::Builder builder_;
};

void write_node(const LabeledTree& tree, const Vocab& vocab, std::size_t id, std::string& out) {
  const TreeNode& n = tree.node(id);
  out += '(';
  out += n.label ? std::to_string(*n.label) : std::string("X");
  out += ' ';
  if (n.is_leaf()) {
    out += vocab.token(n.token);
  } else {
    write_node(tree, vocab, static_cast<std::size_t>(n.left), out);
    out += ' ';
    write_node(tree, vocab, static_cast<std::size_t>(n.right), out);
  }
  out += ')';
}

}  // namespace

LabeledTree parse_tree(std::string_view text, Vocab& vocab, const TreeParseOptions& options,
                       std::size_t line_number) {
  const RawNode raw = SexprReader(text, line_number).read_root();
  TreeConverter converter(vocab, options, line_number);
  converter.convert(raw);
  return std::move(converter).finish();
}

std::vector<LabeledTree> parse_sexpr_treebank(std::istream& in, Vocab& vocab, const TreeParseOptions& options) {
  std::vector<LabeledTree> trees;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    trees.push_back(parse_tree(line, vocab, options, line_number));
  }
  return trees;
}

std::string to_sexpr(const LabeledTree& tree, const Vocab& vocab) {
  std::string out;
  write_node(tree, vocab, tree.root(), out);
  return out;
}

LabeledTree left_branching_tree(std::span<const TokenId> tokens, std::optional<int> label) {
  if (tokens.empty()) throw ValidationError("cannot build a tree over no tokens");
  LabeledTree::Builder b;
  std::size_t acc = b.leaf(tokens[0], label);
  for (std::size_t i = 1; i < tokens.size(); ++i) acc = b.internal(acc, b.leaf(tokens[i], label), label);
  return std::move(b).build();
}

LabeledTree right_branching_tree(std::span<const TokenId> tokens, std::optional<int> label) {
  if (tokens.empty()) throw ValidationError("cannot build a tree over no tokens");
  LabeledTree::Builder b;
  std::size_t acc = b.leaf(tokens.back(), label);
  for (std::size_t i = tokens.size() - 1; i-- > 0;) {
    const std::size_t left = b.leaf(tokens[i], label);
    acc = b.internal(left, acc, label);
  }
  return std::move(b).build();
}

}  // namespace treeseq::corpus
