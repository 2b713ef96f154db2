#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treeseq/autodiff/graph.hpp"
#include "treeseq/autodiff/param_set.hpp"
#include "treeseq/corpus/tree.hpp"
#include "treeseq/random.hpp"

namespace treeseq::model {

using ad::Graph;
using ad::NodeId;
using ad::ParamSet;
using corpus::LabeledTree;
using corpus::TokenId;

enum class ModelKind { tree, sequence, bi_sequence, lstm, bi_lstm, tree_lstm, hierarchical };

std::string_view model_name(ModelKind kind);
/// Accepts the names printed by model_name ("tree", "bi-sequence", ...).
ModelKind parse_model_kind(std::string_view name);
std::span<const ModelKind> all_model_kinds();
bool needs_tree(ModelKind kind);

/// How the two directions of a bi-directional model are merged per position.
enum class Combine {
  /// tanh(W_L · [backward; forward]), keeps dimension K.
  project,
  /// [backward; forward], dimension 2K.
  concat,
};

std::string_view combine_name(Combine combine);
Combine parse_combine(std::string_view name);

struct ModelOptions {
  ModelKind kind = ModelKind::sequence;
  std::size_t dim = 50;
  Combine combine = Combine::project;
  /// Stacked layers of the bi-LSTM.
  std::size_t layers = 1;
  /// Clause-ending tokens for the hierarchical model.
  std::vector<TokenId> punctuation;

  /// Dimension of Encoding::summary.
  std::size_t summary_dim() const;
  /// Dimension of each Encoding::units entry.
  std::size_t unit_dim() const;
};

/// Name of the |V| x K word embedding parameter.
inline constexpr std::string_view kEmbeddingParam = "emb";

/// Per-unit vectors and the summary vector of one encoded input, as graph nodes.
struct Encoding {
  /// One per timestep (sequence models), per tree node id (tree models), or
  /// clause vectors followed by top-level states (hierarchical).
  std::vector<NodeId> units;
  NodeId summary;
  /// Direction-specific states of bi-directional models, indexed by position.
  std::vector<NodeId> forward;
  std::vector<NodeId> backward;
  /// LSTM memory cells aligned with the recurrent states.
  std::vector<NodeId> memory;
};

/// What an encoder consumes: a token sequence and, for tree models, its tree.
struct ModelInput {
  std::span<const TokenId> tokens;
  const LabeledTree* tree = nullptr;
};

/// Uniform(−r, r) with r = sqrt(6 / (rows + cols)).
ad::Tensor glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng);

/// Adds the composition weights of `options.kind` (not embeddings or heads).
void add_model_params(ParamSet& params, const ModelOptions& options, Rng& rng);

NodeId embed(Graph& graph, const ParamSet& params, TokenId token);

/// h_t = tanh(W·h_{t−1} + V·x_t) over `inputs` using `<prefix>.W` and `<prefix>.V`.
/// h_0 is zero unless `initial` is given. `reverse` runs right to left but the
/// returned states stay indexed by input position.
std::vector<NodeId> recurrent_chain(Graph& graph, const ParamSet& params, std::string_view prefix,
                                    std::span<const NodeId> inputs, std::optional<NodeId> initial = std::nullopt,
                                    bool reverse = false);

struct LstmStates {
  std::vector<NodeId> hidden;
  std::vector<NodeId> memory;
};

/// Gates (i, f, o, l) = (σ, σ, σ, tanh) of W·[h_{t−1}; x_t] with `<prefix>.W` ∈ R^{4K×2K};
/// c_t = f⊙c_{t−1} + i⊙l, h_t = o⊙c_t, zero initial states.
LstmStates lstm_chain(Graph& graph, const ParamSet& params, std::string_view prefix,
                      std::span<const NodeId> inputs, bool reverse = false);

/// One LSTM step from explicit previous states.
std::pair<NodeId, NodeId> lstm_step(Graph& graph, const ParamSet& params, std::string_view prefix, NodeId input,
                                    NodeId hidden, NodeId memory);

Encoding encode_sequence(Graph& graph, const ParamSet& params, std::span<const TokenId> tokens,
                         std::string_view prefix = "seq");
/// e_η = tanh(W·e_left + V·e_right); leaves are word embeddings.
Encoding encode_tree(Graph& graph, const ParamSet& params, const LabeledTree& tree,
                     std::string_view prefix = "tree");
Encoding encode_bisequence(Graph& graph, const ParamSet& params, std::span<const TokenId> tokens,
                           Combine combine = Combine::project, std::string_view prefix = "bi");
Encoding encode_lstm(Graph& graph, const ParamSet& params, std::span<const TokenId> tokens,
                     std::string_view prefix = "lstm");
Encoding encode_bilstm(Graph& graph, const ParamSet& params, std::span<const TokenId> tokens,
                       Combine combine = Combine::project, std::size_t layers = 1,
                       std::string_view prefix = "bilstm");
/// Bi-LSTM over already-embedded inputs (used for clause encoding).
Encoding encode_bilstm_inputs(Graph& graph, const ParamSet& params, std::span<const NodeId> inputs,
                              Combine combine, std::size_t layers, std::string_view prefix);
Encoding encode_treelstm(Graph& graph, const ParamSet& params, const LabeledTree& tree,
                         std::string_view prefix = "treelstm");
/// Clauses (split after punctuation) are encoded by a projected bi-LSTM; a
/// left-to-right LSTM over the clause vectors yields the summary.
Encoding encode_hierarchical(Graph& graph, const ParamSet& params, std::span<const TokenId> tokens,
                             std::span<const TokenId> punctuation, std::string_view prefix = "hier");

/// Dispatches on options.kind using the default parameter prefixes.
Encoding encode(Graph& graph, const ParamSet& params, const ModelOptions& options, ModelInput input);

/// Number of composition cell applications on the shortest path from the
/// summary back to the embedding of token `token_index`, counting the cell that
/// takes the token in. Direction-merging projections and heads are not counted,
/// so the standard sequence model gives N − index and a single-leaf tree 0.
std::size_t composition_depth(const ModelOptions& options, ModelInput input, std::size_t token_index);

}  // namespace treeseq::model
