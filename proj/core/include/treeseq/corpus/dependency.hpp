#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treeseq/corpus/tree.hpp"
#include "treeseq/corpus/vocab.hpp"

namespace treeseq::corpus {

/// Dependency parse of one sentence. Positions are 1-based; head 0 is the artificial root.
struct DependencyGraph {
  std::vector<TokenId> tokens;
  std::vector<std::size_t> heads;
  std::size_t e1 = 0;
  std::size_t e2 = 0;

  std::size_t size() const noexcept { return tokens.size(); }
  /// Exactly one root, heads in range, no cycles, entities distinct and in range.
  /// Throws StructuralError or ValidationError.
  void validate() const;
};

/// Positions on the undirected path e1 -> e2 through head links, both endpoints included.
std::vector<std::size_t> dependency_path_positions(const DependencyGraph& graph);
/// Token ids along dependency_path_positions.
std::vector<TokenId> dependency_path(const DependencyGraph& graph);

/// Binary tree over the path tokens in path order: the e1 side up to the
/// common ancestor is left-branching, the descent to e2 is right-branching,
/// and the root joins the two sides, so both nominals meet near the root.
LabeledTree path_tree(const DependencyGraph& graph);

/// 19 relation labels: "Other" then each of the 9 relations in both directions.
std::span<const std::string> relation_labels();
/// Throws ValidationError for unknown labels.
int relation_index(std::string_view label);

struct RelationInstance {
  std::string id;
  DependencyGraph graph;
  int relation = 0;
};

/// Blank-line separated blocks. First line of a block: the relation label.
/// Following lines: index <TAB> token <TAB> head <TAB> e1|e2|O.
std::vector<RelationInstance> read_relation_file(std::istream& in, Vocab& vocab);
void write_relation_file(std::ostream& out, std::span<const RelationInstance> items, const Vocab& vocab);

}  // namespace treeseq::corpus
