#include "treeseq/task/task_model.hpp"

#include <array>

#include "treeseq/errors.hpp"

namespace treeseq::task {

namespace {

constexpr std::array<std::pair<TaskKind, std::string_view>, 4> kTasks{{
    {TaskKind::treebank_sentiment, "treebank-sentiment"},
    {TaskKind::pang_sentiment, "pang-sentiment"},
    {TaskKind::qa_match, "qa-match"},
    {TaskKind::semeval_relation, "semeval-relation"},
}};

std::vector<int> sample_negatives(std::span<const int> pool, int gold, std::size_t count, Rng& rng) {
  std::vector<int> others;
  for (const int a : pool) {
    if (a != gold) others.push_back(a);
  }
  if (others.size() <= count) return others;
  // Partial Fisher-Yates: the first `count` slots are a uniform sample without replacement.
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(others.size() - i));
    std::swap(others[i], others[j]);
  }
  others.resize(count);
  return others;
}

}  // namespace

std::string_view task_name(TaskKind kind) {
  for (const auto& [k, name] : kTasks) {
    if (k == kind) return name;
  }
  return "unknown";
}

TaskKind parse_task_kind(std::string_view name) {
  for (const auto& [k, n] : kTasks) {
    if (n == name) return k;
  }
  throw ValidationError("unknown task '" + std::string(name) +
                        "' (expected treebank-sentiment, pang-sentiment, qa-match or semeval-relation)");
}

std::size_t default_classes(TaskKind kind) {
  switch (kind) {
    case TaskKind::treebank_sentiment: return 5;
    case TaskKind::pang_sentiment: return 2;
    case TaskKind::qa_match: return 0;
    case TaskKind::semeval_relation: return 19;
  }
  return 0;
}

TaskModel::TaskModel(TaskOptions options) : options_(std::move(options)) {
  if (options_.model.dim == 0) throw ValidationError("model dimension must be positive");
  if (options_.kind == TaskKind::qa_match) {
    if (options_.answers < 2) throw ValidationError("QA needs an answer table of at least 2 answers");
    if (options_.negatives == 0) throw ValidationError("QA needs at least one sampled negative");
  } else if (options_.classes < 2) {
    throw ValidationError("classification needs at least 2 classes");
  }
}

ParamSet TaskModel::init_params(const corpus::EmbeddingTable& embeddings, Rng& rng) const {
  if (embeddings.dim() != options_.model.dim) {
    throw ValidationError("embedding dimension " + std::to_string(embeddings.dim()) + " differs from model dimension " +
                          std::to_string(options_.model.dim));
  }
  ParamSet params;
  params.add(std::string(model::kEmbeddingParam), embeddings.matrix, {embeddings.trainable, false});
  model::add_model_params(params, options_.model, rng);
  if (options_.kind == TaskKind::qa_match) {
    add_answer_table(params, options_.answers, options_.model.unit_dim(), rng);
  } else {
    add_softmax_head(params, kHeadPrefix, options_.classes, options_.model.summary_dim(), rng);
  }
  return params;
}

void TaskModel::check_example(const corpus::Example& example) const {
  if (model::needs_tree(options_.model.kind) && !example.tree) {
    throw ValidationError(std::string(model::model_name(options_.model.kind)) + " model needs tree-bearing data (example '" +
                          example.id + "' has no tree)");
  }
  if (example.tokens.empty() && !example.tree) throw ValidationError("example '" + example.id + "' is empty");
  if (options_.kind == TaskKind::qa_match) {
    if (example.label < 0 || static_cast<std::size_t>(example.label) >= options_.answers) {
      throw ValidationError("answer id out of range in example '" + example.id + "'");
    }
    for (const int a : example.candidates) {
      if (a < 0 || static_cast<std::size_t>(a) >= options_.answers) {
        throw ValidationError("candidate id out of range in example '" + example.id + "'");
      }
    }
    if (example.candidates.size() < 2) throw ValidationError("QA example '" + example.id + "' needs a pool of 2+");
  }
}

model::ModelInput TaskModel::input_of(const corpus::Example& example) const {
  return {example.tokens, example.tree ? &*example.tree : nullptr};
}

NodeId TaskModel::loss(Graph& graph, const ParamSet& params, const corpus::Example& example, Rng& rng) const {
  check_example(example);
  const auto enc = model::encode(graph, params, options_.model, input_of(example));
  if (options_.kind == TaskKind::qa_match) {
    std::vector<NodeId> terms;
    terms.reserve(enc.units.size());
    for (const NodeId u : enc.units) {
      const auto negatives = sample_negatives(example.candidates, example.label, options_.negatives, rng);
      terms.push_back(qa_margin_loss(graph, params, std::span(&u, 1), example.label, negatives));
    }
    return graph.sum(terms);
  }
  const bool per_node = options_.kind == TaskKind::treebank_sentiment && example.tree &&
                        model::needs_tree(options_.model.kind);
  if (!per_node) {
    if (example.label < 0) throw ValidationError("example '" + example.id + "' has no label");
    return softmax_loss(graph, params, kHeadPrefix, enc.summary, static_cast<std::size_t>(example.label));
  }
  std::vector<NodeId> terms;
  const auto& nodes = example.tree->nodes();
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    if (!nodes[id].label) continue;
    terms.push_back(softmax_loss(graph, params, kHeadPrefix, enc.units[id], static_cast<std::size_t>(*nodes[id].label)));
  }
  if (terms.empty()) throw ValidationError("tree of example '" + example.id + "' has no labeled node");
  return graph.sum(terms);
}

Prediction TaskModel::classify(const Graph& graph, const ParamSet& params, NodeId x, std::string id, int gold) const {
  Prediction p;
  p.id = std::move(id);
  p.gold = gold;
  p.scores = softmax(head_logits(params, kHeadPrefix, graph.value(x)));
  p.predicted = static_cast<int>(argmax(p.scores));
  return p;
}

std::vector<Prediction> TaskModel::predict(const ParamSet& params, const corpus::Example& example,
                                           bool all_nodes) const {
  check_example(example);
  Graph graph;
  const auto enc = model::encode(graph, params, options_.model, input_of(example));

  if (options_.kind == TaskKind::qa_match) {
    std::vector<ad::Tensor> units;
    units.reserve(enc.units.size());
    for (const NodeId u : enc.units) units.push_back(graph.value(u));
    const auto& answers = params[kAnswerParam];
    Prediction p;
    p.id = example.id;
    p.gold = example.label;
    p.predicted = qa_predict(units, answers, example.candidates);
    for (const double l : qa_candidate_losses(units, answers, example.candidates)) p.scores.push_back(-l);
    return {std::move(p)};
  }

  const bool per_node = options_.kind == TaskKind::treebank_sentiment && example.tree && all_nodes;
  if (!per_node) return {classify(graph, params, enc.summary, example.id, example.label)};

  const auto& tree = *example.tree;
  const bool tree_model = model::needs_tree(options_.model.kind);
  const auto tokens = tree.tokens();
  std::vector<Prediction> out;
  for (std::size_t id = 0; id < tree.size(); ++id) {
    const auto& n = tree.node(id);
    if (!n.label) continue;
    std::string pid = id == tree.root()  ? root_id(example.id)
                      : n.is_leaf()      ? word_id(example.id, n.span.begin)
                                         : phrase_id(example.id, n.span.begin, n.span.end);
    if (tree_model) {
      out.push_back(classify(graph, params, enc.units[id], std::move(pid), *n.label));
    } else if (id == tree.root()) {
      out.push_back(classify(graph, params, enc.summary, std::move(pid), *n.label));
    } else {
      Graph span_graph;
      const std::span<const corpus::TokenId> span(tokens.data() + n.span.begin, n.span.size());
      const auto sub = model::encode(span_graph, params, options_.model, {span, nullptr});
      out.push_back(classify(span_graph, params, sub.summary, std::move(pid), *n.label));
    }
  }
  return out;
}

}  // namespace treeseq::task
