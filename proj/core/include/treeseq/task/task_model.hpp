#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "treeseq/corpus/datasets.hpp"
#include "treeseq/corpus/embeddings.hpp"
#include "treeseq/model/encoders.hpp"
#include "treeseq/random.hpp"
#include "treeseq/task/heads.hpp"
#include "treeseq/task/predictions.hpp"

namespace treeseq::task {

enum class TaskKind { treebank_sentiment, pang_sentiment, qa_match, semeval_relation };

std::string_view task_name(TaskKind kind);
/// "treebank-sentiment", "pang-sentiment", "qa-match" or "semeval-relation".
TaskKind parse_task_kind(std::string_view name);
/// Softmax classes of the task (0 for QA).
std::size_t default_classes(TaskKind kind);

/// Prefix of the classifier head parameters.
inline constexpr std::string_view kHeadPrefix = "head";

struct TaskOptions {
  TaskKind kind = TaskKind::treebank_sentiment;
  model::ModelOptions model;
  std::size_t classes = 5;
  /// Size of the answer table (QA only).
  std::size_t answers = 0;
  /// Negatives sampled per unit during QA training.
  std::size_t negatives = 50;
};

/// An encoder plus the task head on top of it.
class TaskModel {
 public:
  /// Throws ValidationError for inconsistent options.
  explicit TaskModel(TaskOptions options);

  const TaskOptions& options() const noexcept { return options_; }

  /// Embeddings (unregularized, trainable per the table flag), encoder weights and head.
  ParamSet init_params(const corpus::EmbeddingTable& embeddings, Rng& rng) const;

  /// Throws ValidationError when the example lacks what the model or task needs.
  void check_example(const corpus::Example& example) const;

  /// Training loss of one example. Treebank trees fed to tree models
  /// contribute one softmax term per labeled node. `rng` drives QA negative sampling.
  NodeId loss(Graph& graph, const ParamSet& params, const corpus::Example& example, Rng& rng) const;

  /// With `all_nodes`, treebank examples carrying a tree yield one prediction
  /// per labeled node (sequence models re-encode each node span); otherwise
  /// one prediction per example.
  std::vector<Prediction> predict(const ParamSet& params, const corpus::Example& example,
                                  bool all_nodes = true) const;

 private:
  Prediction classify(const Graph& graph, const ParamSet& params, NodeId x, std::string id, int gold) const;
  model::ModelInput input_of(const corpus::Example& example) const;

  TaskOptions options_;
};

}  // namespace treeseq::task
