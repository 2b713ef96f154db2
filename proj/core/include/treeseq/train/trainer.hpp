#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "treeseq/autodiff/param_set.hpp"
#include "treeseq/corpus/datasets.hpp"
#include "treeseq/eval/metrics.hpp"
#include "treeseq/task/task_model.hpp"

namespace treeseq::train {

using ad::ParamSet;
using corpus::Example;

struct TrainConfig {
  double learning_rate = 0.05;
  double l2 = 1e-5;
  std::size_t batch_size = 20;
  std::size_t epochs = 15;
  std::uint64_t seed = 1;
  bool embeddings_trainable = true;
  task::TaskKind task = task::TaskKind::treebank_sentiment;
  model::ModelKind model = model::ModelKind::sequence;
  std::size_t dim = 50;
  double epsilon = 1e-6;
  /// Dev-set selection metric; also the reported test metric.
  eval::Filter metric = eval::Filter::root;

  /// Throws ValidationError for non-positive rate, batch size or epochs, or negative L2.
  void validate() const;
};

/// Squared-gradient accumulators with the layout of the trained ParamSet.
struct AdaGradState {
  ParamSet accum;
  double epsilon = 1e-6;

  static AdaGradState for_params(const ParamSet& params, double epsilon = 1e-6);
};

/// g = grads + λθ (regularized tensors only); G += g²; θ −= η·g / (√G + ε).
/// Frozen tensors are left alone. A non-finite gradient throws NumericError
/// naming the tensor before anything is modified.
void adagrad_step(ParamSet& params, const ParamSet& grads, AdaGradState& state, double learning_rate, double l2);

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_metric = 0.0;
  double seconds = 0.0;
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::vector<double> dev_metrics;
  std::vector<double> train_losses;
  /// 1-based epoch whose parameters were harvested (earliest best dev metric).
  std::size_t best_epoch = 0;
  ParamSet params;
  double test_metric = 0.0;
  std::vector<task::Prediction> test_predictions;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Mean loss gradient of a batch, added into `grads` (which is zeroed first).
/// Returns the summed loss. Throws NumericError on a non-finite loss.
double batch_gradient(const task::TaskModel& model, const ParamSet& params, std::span<const Example* const> batch,
                      ParamSet& grads, Rng& rng);

/// Predictions for every example (all labeled nodes when the filter needs them).
std::vector<task::Prediction> predict_all(const task::TaskModel& model, const ParamSet& params,
                                          std::span<const Example> examples, eval::Filter filter);

double evaluate(const task::TaskModel& model, const ParamSet& params, std::span<const Example> examples,
                eval::Filter filter);

/// Seeded minibatch AdaGrad for config.epochs epochs; the parameters with the
/// best dev metric are harvested and scored on the test split.
RunRecord train(const TrainConfig& config, const task::TaskModel& model, const corpus::Splits<Example>& data,
                ParamSet initial, const EpochCallback& on_epoch = {});

struct RepeatResult {
  std::vector<RunRecord> runs;
  eval::Summary test;
};

/// Builds initial parameters for a run seed.
using ParamFactory = std::function<ParamSet(std::uint64_t seed)>;

/// Runs with seeds config.seed + i on up to `jobs` threads; records are kept
/// in run order, so results do not depend on `jobs`.
RepeatResult repeat_runs(const TrainConfig& config, const task::TaskModel& model, const corpus::Splits<Example>& data,
                         const ParamFactory& init, std::size_t runs, std::size_t jobs = 1,
                         const std::function<void(std::size_t run, const EpochLog&)>& on_epoch = {});

}  // namespace treeseq::train
