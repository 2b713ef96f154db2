#include "treeseq/corpus/dependency.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <istream>
#include <ostream>

#include "treeseq/errors.hpp"

namespace treeseq::corpus {

void DependencyGraph::validate() const {
  const std::size_t n = tokens.size();
  if (n == 0) throw ValidationError("dependency graph has no tokens");
  if (heads.size() != n) throw ValidationError("dependency graph needs one head per token");
  std::size_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (heads[i] > n) throw StructuralError("head index " + std::to_string(heads[i]) + " out of range");
    if (heads[i] == i + 1) throw StructuralError("token " + std::to_string(i + 1) + " is its own head");
    if (heads[i] == 0) ++roots;
  }
  if (roots != 1) throw StructuralError("dependency graph must have exactly one root, found " + std::to_string(roots));
  for (std::size_t i = 1; i <= n; ++i) {
    std::size_t cur = i;
    std::size_t steps = 0;
    while (cur != 0) {
      cur = heads[cur - 1];
      if (++steps > n) throw StructuralError("dependency graph is disconnected (cycle through token " +
                                             std::to_string(i) + ")");
    }
  }
  if (e1 == 0 || e1 > n || e2 == 0 || e2 > n) throw ValidationError("entity positions out of range");
  if (e1 == e2) throw ValidationError("entities must be distinct");
}

namespace {

std::vector<std::size_t> chain_to_root(const DependencyGraph& g, std::size_t start) {
  std::vector<std::size_t> chain;
  for (std::size_t cur = start; cur != 0; cur = g.heads[cur - 1]) chain.push_back(cur);
  return chain;
}

// Path positions plus the index of the common ancestor inside it.
std::pair<std::vector<std::size_t>, std::size_t> path_with_apex(const DependencyGraph& g) {
  g.validate();
  const auto up1 = chain_to_root(g, g.e1);
  const auto up2 = chain_to_root(g, g.e2);
  std::size_t apex1 = 0;
  std::size_t apex2 = 0;
  bool found = false;
  for (std::size_t j = 0; j < up2.size() && !found; ++j) {
    const auto it = std::find(up1.begin(), up1.end(), up2[j]);
    if (it != up1.end()) {
      apex1 = static_cast<std::size_t>(it - up1.begin());
      apex2 = j;
      found = true;
    }
  }
  if (!found) throw StructuralError("entities are not connected in the dependency graph");
  std::vector<std::size_t> path(up1.begin(), up1.begin() + static_cast<std::ptrdiff_t>(apex1) + 1);
  for (std::size_t j = apex2; j-- > 0;) path.push_back(up2[j]);
  return {std::move(path), apex1};
}

const std::array<std::string, 19>& label_table() {
  static const std::array<std::string, 19> labels = [] {
    std::array<std::string, 19> out;
    out[0] = "Other";
    const std::array<const char*, 9> relations{"Cause-Effect",      "Instrument-Agency",  "Product-Producer",
                                               "Content-Container", "Entity-Origin",      "Entity-Destination",
                                               "Component-Whole",   "Member-Collection",  "Message-Topic"};
    for (std::size_t i = 0; i < relations.size(); ++i) {
      out[1 + 2 * i] = std::string(relations[i]) + "(e1,e2)";
      out[2 + 2 * i] = std::string(relations[i]) + "(e2,e1)";
    }
    return out;
  }();
  return labels;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

std::size_t parse_index(std::string_view s, std::size_t line) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("expected an index, got '" + std::string(s) + "'", line);
  return v;
}

}  // namespace

std::vector<std::size_t> dependency_path_positions(const DependencyGraph& graph) {
  return path_with_apex(graph).first;
}

std::vector<TokenId> dependency_path(const DependencyGraph& graph) {
  std::vector<TokenId> out;
  for (const std::size_t p : dependency_path_positions(graph)) out.push_back(graph.tokens[p - 1]);
  return out;
}

LabeledTree path_tree(const DependencyGraph& graph) {
  const auto [path, apex] = path_with_apex(graph);
  LabeledTree::Builder b;
  std::size_t left = b.leaf(graph.tokens[path[0] - 1]);
  for (std::size_t i = 1; i <= apex; ++i) left = b.internal(left, b.leaf(graph.tokens[path[i] - 1]));
  if (apex + 1 == path.size()) return std::move(b).build();
  std::size_t right = b.leaf(graph.tokens[path.back() - 1]);
  for (std::size_t i = path.size() - 1; i-- > apex + 1;) {
    const std::size_t l = b.leaf(graph.tokens[path[i] - 1]);
    right = b.internal(l, right);
  }
  b.internal(left, right);
  return std::move(b).build();
}

std::span<const std::string> relation_labels() { return label_table(); }

int relation_index(std::string_view label) {
  const auto& labels = label_table();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return static_cast<int>(i);
  }
  throw ValidationError("unknown relation label '" + std::string(label) + "'");
}

std::vector<RelationInstance> read_relation_file(std::istream& in, Vocab& vocab) {
  std::vector<RelationInstance> out;
  std::string line;
  std::size_t line_number = 0;
  std::optional<RelationInstance> current;
  std::size_t block_start = 0;

  const auto finish = [&] {
    if (!current) return;
    if (current->graph.tokens.empty()) throw ParseError("relation block has no tokens", block_start);
    if (current->graph.e1 == 0 || current->graph.e2 == 0) {
      throw ParseError("relation block needs one e1 and one e2 marker", block_start);
    }
    try {
      current->graph.validate();
    } catch (const Error& e) {
      throw ParseError(e.what(), block_start);
    }
    out.push_back(std::move(*current));
    current.reset();
  };

  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      finish();
      continue;
    }
    const auto fields = split_tabs(line);
    if (!current) {
      current.emplace();
      block_start = line_number;
      try {
        current->relation = relation_index(fields[0]);
      } catch (const ValidationError& e) {
        throw ParseError(e.what(), line_number);
      }
      current->id = fields.size() > 1 ? std::string(fields[1]) : "r" + std::to_string(out.size());
      continue;
    }
    if (fields.size() != 4) throw ParseError("expected 4 tab-separated columns", line_number);
    const std::size_t index = parse_index(fields[0], line_number);
    auto& g = current->graph;
    if (index != g.tokens.size() + 1) throw ParseError("token indices must run 1..n in order", line_number);
    g.tokens.push_back(vocab.intern(fields[1]));
    g.heads.push_back(parse_index(fields[2], line_number));
    if (fields[3] == "e1") {
      if (g.e1 != 0) throw ParseError("duplicate e1 marker", line_number);
      g.e1 = index;
    } else if (fields[3] == "e2") {
      if (g.e2 != 0) throw ParseError("duplicate e2 marker", line_number);
      g.e2 = index;
    } else if (fields[3] != "O") {
      throw ParseError("entity marker must be e1, e2 or O", line_number);
    }
  }
  finish();
  return out;
}

void write_relation_file(std::ostream& out, std::span<const RelationInstance> items, const Vocab& vocab) {
  for (std::size_t k = 0; k < items.size(); ++k) {
    const auto& item = items[k];
    if (k > 0) out << '\n';
    out << label_table().at(static_cast<std::size_t>(item.relation)) << '\t' << item.id << '\n';
    const auto& g = item.graph;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::size_t pos = i + 1;
      out << pos << '\t' << vocab.token(g.tokens[i]) << '\t' << g.heads[i] << '\t'
          << (pos == g.e1 ? "e1" : pos == g.e2 ? "e2" : "O") << '\n';
    }
  }
}

}  // namespace treeseq::corpus
