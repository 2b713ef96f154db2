#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "treeseq/eval/metrics.hpp"
#include "treeseq/eval/table.hpp"
#include "treeseq/model/encoders.hpp"
#include "treeseq/task/task_model.hpp"
#include "treeseq/train/trainer.hpp"

namespace treeseq::cli {

/// Every knob of an experiment. Serialized as one flat JSON object whose keys
/// match the `--set` names.
struct ExperimentConfig {
  task::TaskKind task = task::TaskKind::treebank_sentiment;
  model::ModelKind model = model::ModelKind::sequence;
  std::size_t dim = 50;
  double learning_rate = 0.05;
  double l2 = 1e-5;
  std::size_t batch_size = 20;
  std::size_t epochs = 15;
  std::uint64_t seed = 1;
  double epsilon = 1e-6;
  /// Unset: fixed for pang-sentiment, trainable otherwise.
  std::optional<bool> embeddings_trainable;
  eval::Filter metric = eval::Filter::root;
  model::Combine combine = model::Combine::project;
  std::size_t layers = 1;
  std::size_t negatives = 50;
  /// 0: the task default.
  std::size_t classes = 0;
  /// 0: inferred from the data.
  std::size_t answers = 0;
  /// Treebank sequence models train on the distinct phrases of the training trees.
  bool phrase_training = true;

  std::string input;
  std::string data;
  std::string embeddings;
  std::size_t train_count = 0;
  std::size_t dev_count = 0;
  std::size_t test_count = 0;
  double train_ratio = 0.8;
  double dev_ratio = 0.1;
  double test_ratio = 0.1;
  std::uint64_t split_seed = 0;

  std::size_t runs = 20;

  std::string mode = "bootstrap";
  std::vector<eval::Filter> filters{eval::Filter::root};
  std::size_t resamples = eval::kDefaultResamples;
  eval::Sidedness sidedness = eval::Sidedness::one_sided;
  eval::TableFormat format = eval::TableFormat::tsv;
  std::vector<std::string> names;

  /// Throws ValidationError for unknown keys or ill-typed values.
  static ExperimentConfig from_json(const nlohmann::json& json);
  /// Defaults resolved: feeding the result back to from_json reproduces the config.
  nlohmann::json to_json() const;

  bool resolved_embeddings_trainable() const;
  train::TrainConfig train_config() const;
  model::ModelOptions model_options() const;
};

/// Defaults, then the JSON file, then `key=value` overrides (later wins).
/// Throws ValidationError or IoError.
ExperimentConfig load_config(const std::optional<std::filesystem::path>& file, const std::vector<std::string>& overrides);

/// Applies one `key=value` override to a config JSON object.
void apply_override(nlohmann::json& json, std::string_view assignment);

}  // namespace treeseq::cli
