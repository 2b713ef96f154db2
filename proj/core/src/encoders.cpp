#include "treeseq/model/encoders.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "treeseq/corpus/phrases.hpp"
#include "treeseq/errors.hpp"

namespace treeseq::model {

namespace {

constexpr std::array<std::pair<ModelKind, std::string_view>, 7> kKinds{{
    {ModelKind::tree, "tree"},
    {ModelKind::sequence, "sequence"},
    {ModelKind::bi_sequence, "bi-sequence"},
    {ModelKind::lstm, "lstm"},
    {ModelKind::bi_lstm, "bi-lstm"},
    {ModelKind::tree_lstm, "tree-lstm"},
    {ModelKind::hierarchical, "hierarchical"},
}};

constexpr std::array<ModelKind, 7> kAllKinds{ModelKind::tree,    ModelKind::sequence,  ModelKind::bi_sequence,
                                             ModelKind::lstm,    ModelKind::bi_lstm,   ModelKind::tree_lstm,
                                             ModelKind::hierarchical};

std::string join_name(std::string_view prefix, std::string_view leaf) {
  std::string out(prefix);
  out += '.';
  out += leaf;
  return out;
}

std::string layer_prefix(std::string_view prefix, std::size_t layer) {
  return join_name(prefix, "l" + std::to_string(layer));
}

NodeId zeros(Graph& graph, std::size_t dim) { return graph.input(ad::Tensor::vector(dim)); }

void require_tokens(std::span<const TokenId> tokens) {
  if (tokens.empty()) throw ValidationError("cannot encode an empty sequence");
}

std::vector<NodeId> embed_all(Graph& graph, const ParamSet& params, std::span<const TokenId> tokens) {
  std::vector<NodeId> out;
  out.reserve(tokens.size());
  for (const TokenId t : tokens) out.push_back(embed(graph, params, t));
  return out;
}

std::size_t hidden_dim_of(const ParamSet& params, std::string_view w_name, std::size_t blocks) {
  return params[w_name].rows() / blocks;
}

void add_matrix(ParamSet& params, const std::string& name, std::size_t rows, std::size_t cols, Rng& rng) {
  params.add(name, glorot_uniform(rows, cols, rng));
}

void add_bilstm_params(ParamSet& params, std::string_view prefix, std::size_t dim, Combine combine,
                       std::size_t layers, Rng& rng) {
  for (std::size_t l = 0; l < layers; ++l) {
    const std::string lp = layer_prefix(prefix, l);
    add_matrix(params, join_name(lp, "fwd.W"), 4 * dim, 2 * dim, rng);
    add_matrix(params, join_name(lp, "bwd.W"), 4 * dim, 2 * dim, rng);
    if (l + 1 < layers || combine == Combine::project) add_matrix(params, join_name(lp, "WL"), dim, 2 * dim, rng);
  }
}

// Units of a bi-directional layer, from aligned backward/forward states.
std::vector<NodeId> merge_directions(Graph& graph, const ParamSet& params, std::string_view prefix,
                                     std::span<const NodeId> backward, std::span<const NodeId> forward,
                                     Combine combine) {
  std::vector<NodeId> units;
  units.reserve(forward.size());
  for (std::size_t t = 0; t < forward.size(); ++t) {
    const NodeId both = graph.concat(backward[t], forward[t]);
    if (combine == Combine::concat) {
      units.push_back(both);
    } else {
      units.push_back(graph.tanh(graph.matvec(graph.param(params, join_name(prefix, "WL")), both)));
    }
  }
  return units;
}

NodeId bi_summary(Graph& graph, const Encoding& enc, Combine combine) {
  if (combine == Combine::project) return enc.units.back();
  return graph.concat(enc.backward.front(), enc.forward.back());
}

}  // namespace

std::string_view model_name(ModelKind kind) {
  for (const auto& [k, name] : kKinds) {
    if (k == kind) return name;
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (const auto& [k, n] : kKinds) {
    if (n == name) return k;
  }
  throw ValidationError("unknown model kind '" + std::string(name) +
                        "' (expected tree, sequence, bi-sequence, lstm, bi-lstm, tree-lstm or hierarchical)");
}

std::span<const ModelKind> all_model_kinds() { return kAllKinds; }

bool needs_tree(ModelKind kind) { return kind == ModelKind::tree || kind == ModelKind::tree_lstm; }

std::string_view combine_name(Combine combine) { return combine == Combine::project ? "project" : "concat"; }

Combine parse_combine(std::string_view name) {
  if (name == "project") return Combine::project;
  if (name == "concat") return Combine::concat;
  throw ValidationError("unknown combine mode '" + std::string(name) + "' (expected project or concat)");
}

std::size_t ModelOptions::summary_dim() const {
  const bool bi = kind == ModelKind::bi_sequence || kind == ModelKind::bi_lstm;
  return bi && combine == Combine::concat ? 2 * dim : dim;
}

std::size_t ModelOptions::unit_dim() const { return summary_dim(); }

ad::Tensor glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
  const double r = std::sqrt(6.0 / static_cast<double>(rows + cols));
  ad::Tensor t = ad::Tensor::matrix(rows, cols);
  for (double& x : t.data()) x = rng.uniform(-r, r);
  return t;
}

void add_model_params(ParamSet& params, const ModelOptions& options, Rng& rng) {
  const std::size_t k = options.dim;
  if (k == 0) throw ValidationError("model dimension must be positive");
  if (options.layers == 0) throw ValidationError("layer count must be positive");
  switch (options.kind) {
    case ModelKind::sequence:
      add_matrix(params, "seq.W", k, k, rng);
      add_matrix(params, "seq.V", k, k, rng);
      break;
    case ModelKind::tree:
      add_matrix(params, "tree.W", k, k, rng);
      add_matrix(params, "tree.V", k, k, rng);
      break;
    case ModelKind::bi_sequence:
      add_matrix(params, "bi.fwd.W", k, k, rng);
      add_matrix(params, "bi.fwd.V", k, k, rng);
      add_matrix(params, "bi.bwd.W", k, k, rng);
      add_matrix(params, "bi.bwd.V", k, k, rng);
      if (options.combine == Combine::project) add_matrix(params, "bi.WL", k, 2 * k, rng);
      break;
    case ModelKind::lstm:
      add_matrix(params, "lstm.W", 4 * k, 2 * k, rng);
      break;
    case ModelKind::bi_lstm:
      add_bilstm_params(params, "bilstm", k, options.combine, options.layers, rng);
      break;
    case ModelKind::tree_lstm:
      add_matrix(params, "treelstm.leaf.W", 4 * k, 2 * k, rng);
      add_matrix(params, "treelstm.W", 5 * k, 2 * k, rng);
      break;
    case ModelKind::hierarchical:
      add_bilstm_params(params, "hier.clause", k, Combine::project, 1, rng);
      add_matrix(params, "hier.top.W", 4 * k, 2 * k, rng);
      break;
  }
}

NodeId embed(Graph& graph, const ParamSet& params, TokenId token) {
  return graph.lookup(params, kEmbeddingParam, token);
}

std::vector<NodeId> recurrent_chain(Graph& graph, const ParamSet& params, std::string_view prefix,
                                    std::span<const NodeId> inputs, std::optional<NodeId> initial, bool reverse) {
  const NodeId w = graph.param(params, join_name(prefix, "W"));
  const NodeId v = graph.param(params, join_name(prefix, "V"));
  const std::size_t n = inputs.size();
  std::vector<NodeId> states(n);
  NodeId h = initial ? *initial : zeros(graph, graph.value(w).rows());
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t t = reverse ? n - 1 - step : step;
    h = graph.tanh(graph.add(graph.matvec(w, h), graph.matvec(v, inputs[t])));
    states[t] = h;
  }
  return states;
}

std::pair<NodeId, NodeId> lstm_step(Graph& graph, const ParamSet& params, std::string_view prefix, NodeId input,
                                    NodeId hidden, NodeId memory) {
  const NodeId w = graph.param(params, join_name(prefix, "W"));
  const std::size_t k = graph.value(w).rows() / 4;
  const NodeId z = graph.matvec(w, graph.concat(hidden, input));
  const NodeId i = graph.sigmoid(graph.slice(z, 0, k));
  const NodeId f = graph.sigmoid(graph.slice(z, k, k));
  const NodeId o = graph.sigmoid(graph.slice(z, 2 * k, k));
  const NodeId l = graph.tanh(graph.slice(z, 3 * k, k));
  const NodeId c = graph.add(graph.hadamard(f, memory), graph.hadamard(i, l));
  const NodeId h = graph.hadamard(o, c);
  return {h, c};
}

LstmStates lstm_chain(Graph& graph, const ParamSet& params, std::string_view prefix, std::span<const NodeId> inputs,
                      bool reverse) {
  const std::size_t k = hidden_dim_of(params, join_name(prefix, "W"), 4);
  const std::size_t n = inputs.size();
  LstmStates out{std::vector<NodeId>(n), std::vector<NodeId>(n)};
  NodeId h = zeros(graph, k);
  NodeId c = h;
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t t = reverse ? n - 1 - step : step;
    std::tie(h, c) = lstm_step(graph, params, prefix, inputs[t], h, c);
    out.hidden[t] = h;
    out.memory[t] = c;
  }
  return out;
}

Encoding encode_sequence(Graph& graph, const ParamSet& params, std::span<const TokenId> tokens,
                         std::string_view prefix) {
  require_tokens(tokens);
  const auto inputs = embed_all(graph, params, tokens);
  Encoding enc;
  enc.units = recurrent_chain(graph, params, prefix, inputs);
  enc.summary = enc.units.back();
  return enc;
}

Encoding encode_tree(Graph& graph, const ParamSet& params, const LabeledTree& tree, std::string_view prefix) {
  const NodeId w = graph.param(params, join_name(prefix, "W"));
  const NodeId v = graph.param(params, join_name(prefix, "V"));
  Encoding enc;
  enc.units.resize(tree.size());
  for (std::size_t id = 0; id < tree.size(); ++id) {
    const auto& n = tree.node(id);
    if (n.is_leaf()) {
      enc.units[id] = embed(graph, params, n.token);
    } else {
      const NodeId left = enc.units[static_cast<std::size_t>(n.left)];
      const NodeId right = enc.units[static_cast<std::size_t>(n.right)];
      enc.units[id] = graph.tanh(graph.add(graph.matvec(w, left), graph.matvec(v, right)));
    }
  }
  enc.summary = enc.units[tree.root()];
  return enc;
}

Encoding encode_bisequence(Graph& graph, const ParamSet& params, std::span<const TokenId> tokens, Combine combine,
                           std::string_view prefix) {
  require_tokens(tokens);
  const auto inputs = embed_all(graph, params, tokens);
  Encoding enc;
  enc.forward = recurrent_chain(graph, params, join_name(prefix, "fwd"), inputs);
  enc.backward = recurrent_chain(graph, params, join_name(prefix, "bwd"), inputs, std::nullopt, true);
  enc.units = merge_directions(graph, params, prefix, enc.backward, enc.forward, combine);
  enc.summary = bi_summary(graph, enc, combine);
  return enc;
}

Encoding encode_lstm(Graph& graph, const ParamSet& params, std::span<const TokenId> tokens,
                     std::string_view prefix) {
  require_tokens(tokens);
  const auto inputs = embed_all(graph, params, tokens);
  auto states = lstm_chain(graph, params, prefix, inputs);
  Encoding enc;
  enc.units = std::move(states.hidden);
  enc.memory = std::move(states.memory);
  enc.summary = enc.units.back();
  return enc;
}

Encoding encode_bilstm_inputs(Graph& graph, const ParamSet& params, std::span<const NodeId> inputs, Combine combine,
                              std::size_t layers, std::string_view prefix) {
  if (inputs.empty()) throw ValidationError("cannot encode an empty sequence");
  if (layers == 0) throw ValidationError("layer count must be positive");
  Encoding enc;
  std::vector<NodeId> current(inputs.begin(), inputs.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const std::string lp = layer_prefix(prefix, l);
    const bool top = l + 1 == layers;
    const auto fwd = lstm_chain(graph, params, join_name(lp, "fwd"), current);
    const auto bwd = lstm_chain(graph, params, join_name(lp, "bwd"), current, true);
    current = merge_directions(graph, params, lp, bwd.hidden, fwd.hidden, top ? combine : Combine::project);
    if (top) {
      enc.forward = fwd.hidden;
      enc.backward = bwd.hidden;
      enc.memory = fwd.memory;
    }
  }
  enc.units = std::move(current);
  enc.summary = bi_summary(graph, enc, combine);
  return enc;
}

Encoding encode_bilstm(Graph& graph, const ParamSet& params, std::span<const TokenId> tokens, Combine combine,
                       std::size_t layers, std::string_view prefix) {
  require_tokens(tokens);
  const auto inputs = embed_all(graph, params, tokens);
  return encode_bilstm_inputs(graph, params, inputs, combine, layers, prefix);
}

Encoding encode_treelstm(Graph& graph, const ParamSet& params, const LabeledTree& tree, std::string_view prefix) {
  const std::string leaf_prefix = join_name(prefix, "leaf");
  const NodeId w = graph.param(params, join_name(prefix, "W"));
  const std::size_t k = graph.value(w).rows() / 5;
  Encoding enc;
  enc.units.resize(tree.size());
  enc.memory.resize(tree.size());
  std::optional<NodeId> zero;
  for (std::size_t id = 0; id < tree.size(); ++id) {
    const auto& n = tree.node(id);
    if (n.is_leaf()) {
      // Same gate block as a sequential step, applied with zero hidden context.
      const NodeId wl = graph.param(params, join_name(leaf_prefix, "W"));
      if (!zero) zero = zeros(graph, k);
      const NodeId z = graph.matvec(wl, graph.concat(*zero, embed(graph, params, n.token)));
      const NodeId i = graph.sigmoid(graph.slice(z, 0, k));
      const NodeId o = graph.sigmoid(graph.slice(z, 2 * k, k));
      const NodeId l = graph.tanh(graph.slice(z, 3 * k, k));
      const NodeId c = graph.hadamard(i, l);
      enc.memory[id] = c;
      enc.units[id] = graph.hadamard(o, graph.tanh(c));
      continue;
    }
    const auto left = static_cast<std::size_t>(n.left);
    const auto right = static_cast<std::size_t>(n.right);
    const NodeId z = graph.matvec(w, graph.concat(enc.units[left], enc.units[right]));
    const NodeId i = graph.sigmoid(graph.slice(z, 0, k));
    const NodeId f_left = graph.sigmoid(graph.slice(z, k, k));
    const NodeId f_right = graph.sigmoid(graph.slice(z, 2 * k, k));
    const NodeId o = graph.sigmoid(graph.slice(z, 3 * k, k));
    const NodeId l = graph.tanh(graph.slice(z, 4 * k, k));
    const std::array<NodeId, 3> parts{graph.hadamard(f_left, enc.memory[left]),
                                      graph.hadamard(f_right, enc.memory[right]), graph.hadamard(i, l)};
    const NodeId c = graph.sum(parts);
    enc.memory[id] = c;
    enc.units[id] = graph.hadamard(o, graph.tanh(c));
  }
  enc.summary = enc.units[tree.root()];
  return enc;
}

Encoding encode_hierarchical(Graph& graph, const ParamSet& params, std::span<const TokenId> tokens,
                             std::span<const TokenId> punctuation, std::string_view prefix) {
  require_tokens(tokens);
  const auto clauses = corpus::segment_clauses(tokens, punctuation);
  const std::string clause_prefix = join_name(prefix, "clause");
  std::vector<NodeId> clause_vectors;
  clause_vectors.reserve(clauses.size());
  for (const auto& clause : clauses) {
    const auto inputs = embed_all(graph, params, clause);
    clause_vectors.push_back(encode_bilstm_inputs(graph, params, inputs, Combine::project, 1, clause_prefix).summary);
  }
  auto top = lstm_chain(graph, params, join_name(prefix, "top"), clause_vectors);
  Encoding enc;
  enc.units = clause_vectors;
  enc.units.insert(enc.units.end(), top.hidden.begin(), top.hidden.end());
  enc.memory = std::move(top.memory);
  enc.summary = top.hidden.back();
  return enc;
}

Encoding encode(Graph& graph, const ParamSet& params, const ModelOptions& options, ModelInput input) {
  if (needs_tree(options.kind) && input.tree == nullptr) {
    throw ValidationError(std::string(model_name(options.kind)) + " model needs a parse tree");
  }
  switch (options.kind) {
    case ModelKind::tree: return encode_tree(graph, params, *input.tree);
    case ModelKind::sequence: return encode_sequence(graph, params, input.tokens);
    case ModelKind::bi_sequence: return encode_bisequence(graph, params, input.tokens, options.combine);
    case ModelKind::lstm: return encode_lstm(graph, params, input.tokens);
    case ModelKind::bi_lstm: return encode_bilstm(graph, params, input.tokens, options.combine, options.layers);
    case ModelKind::tree_lstm: return encode_treelstm(graph, params, *input.tree);
    case ModelKind::hierarchical: return encode_hierarchical(graph, params, input.tokens, options.punctuation);
  }
  throw ValidationError("unknown model kind");
}

std::size_t composition_depth(const ModelOptions& options, ModelInput input, std::size_t token_index) {
  if (needs_tree(options.kind)) {
    if (input.tree == nullptr) throw ValidationError("tree model needs a parse tree");
    if (token_index >= input.tree->leaf_count()) throw ValidationError("token index out of range");
    const std::size_t ancestors = input.tree->depth(input.tree->leaf_at(token_index));
    // Tree-LSTM leaves run the gate block once more.
    return options.kind == ModelKind::tree_lstm ? ancestors + 1 : ancestors;
  }
  const std::size_t n = input.tokens.size();
  if (token_index >= n) throw ValidationError("token index out of range");
  const std::size_t forward = n - token_index;
  switch (options.kind) {
    case ModelKind::sequence:
    case ModelKind::lstm:
      return forward;
    case ModelKind::bi_sequence:
    case ModelKind::bi_lstm: {
      // The concat summary also holds the first backward state.
      const std::size_t top = options.combine == Combine::project ? forward : std::min(forward, token_index + 1);
      return options.kind == ModelKind::bi_lstm ? top + options.layers - 1 : top;
    }
    case ModelKind::hierarchical: {
      const auto clauses = corpus::segment_clauses(input.tokens, options.punctuation);
      std::size_t start = 0;
      for (std::size_t j = 0; j < clauses.size(); ++j) {
        const std::size_t len = clauses[j].size();
        if (token_index < start + len) return (clauses.size() - j) + (len - (token_index - start));
        start += len;
      }
      break;
    }
    case ModelKind::tree:
    case ModelKind::tree_lstm:
      break;
  }
  throw ValidationError("token index out of range");
}

}  // namespace treeseq::model
