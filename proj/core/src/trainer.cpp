#include "treeseq/train/trainer.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "treeseq/errors.hpp"

namespace treeseq::train {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
  if (!(l2 >= 0.0)) throw ValidationError("L2 coefficient must be nonnegative");
  if (batch_size == 0) throw ValidationError("batch size must be positive");
  if (epochs == 0) throw ValidationError("epoch count must be positive");
  if (dim == 0) throw ValidationError("dimension must be positive");
  if (!(epsilon > 0.0)) throw ValidationError("AdaGrad epsilon must be positive");
}

AdaGradState AdaGradState::for_params(const ParamSet& params, double epsilon) {
  return {params.zeros_like(), epsilon};
}

void adagrad_step(ParamSet& params, const ParamSet& grads, AdaGradState& state, double learning_rate, double l2) {
  if (!params.same_layout(grads) || !params.same_layout(state.accum)) {
    throw ValidationError("parameters, gradients and optimizer state differ in layout");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params.at(i).info.trainable && !grads.at(i).value.all_finite()) {
      throw NumericError("non-finite gradient in parameter '" + params.at(i).name + "'");
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& entry = params.at(i);
    if (!entry.info.trainable) continue;
    const double decay = entry.info.regularized ? l2 : 0.0;
    auto theta = entry.value.data();
    const auto g_in = grads.at(i).value.data();
    auto accum = state.accum.at(i).value.data();
    for (std::size_t k = 0; k < theta.size(); ++k) {
      const double g = g_in[k] + decay * theta[k];
      // A zero gradient leaves both θ and G unchanged; skipping keeps sparse
      // embedding updates cheap.
      if (g == 0.0) continue;
      accum[k] += g * g;
      theta[k] -= learning_rate * g / (std::sqrt(accum[k]) + state.epsilon);
    }
  }
}

double batch_gradient(const task::TaskModel& model, const ParamSet& params, std::span<const Example* const> batch,
                      ParamSet& grads, Rng& rng) {
  grads.zero();
  double total = 0.0;
  for (const Example* ex : batch) {
    ad::Graph graph;
    const auto loss = model.loss(graph, params, *ex, rng);
    const double value = graph.value(loss)[0];
    if (!std::isfinite(value)) throw NumericError("non-finite training loss on example '" + ex->id + "'");
    total += value;
    graph.backward(loss, grads);
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (auto& e : grads.entries()) e.value.scale(inv);
  return total;
}

std::vector<task::Prediction> predict_all(const task::TaskModel& model, const ParamSet& params,
                                          std::span<const Example> examples, eval::Filter filter) {
  const bool all_nodes = filter != eval::Filter::root && filter != eval::Filter::root_coarse;
  std::vector<task::Prediction> out;
  for (const auto& ex : examples) {
    auto preds = model.predict(params, ex, all_nodes);
    out.insert(out.end(), std::make_move_iterator(preds.begin()), std::make_move_iterator(preds.end()));
  }
  return out;
}

double evaluate(const task::TaskModel& model, const ParamSet& params, std::span<const Example> examples,
                eval::Filter filter) {
  return eval::accuracy(predict_all(model, params, examples, filter), filter);
}

RunRecord train(const TrainConfig& config, const task::TaskModel& model, const corpus::Splits<Example>& data,
                ParamSet initial, const EpochCallback& on_epoch) {
  config.validate();
  if (data.train.empty()) throw ValidationError("training split is empty");
  if (data.dev.empty()) throw ValidationError("dev split is empty");
  for (const auto& ex : data.train) model.check_example(ex);

  RunRecord record;
  record.seed = config.seed;
  ParamSet params = std::move(initial);
  ParamSet grads = params.zeros_like();
  auto state = AdaGradState::for_params(params, config.epsilon);
  double best = -1.0;

  std::vector<const Example*> order;
  order.reserve(data.train.size());
  for (const auto& ex : data.train) order.push_back(&ex);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(config.seed, epoch);
    rng.shuffle(order);
    double loss = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const std::span<const Example* const> batch(order.data() + begin, end - begin);
      loss += batch_gradient(model, params, batch, grads, rng);
      adagrad_step(params, grads, state, config.learning_rate, config.l2);
    }
    const double dev = evaluate(model, params, data.dev, config.metric);
    record.train_losses.push_back(loss / static_cast<double>(order.size()));
    record.dev_metrics.push_back(dev);
    if (dev > best) {
      best = dev;
      record.best_epoch = epoch;
      record.params = params;
    }
    if (on_epoch) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      on_epoch({epoch, record.train_losses.back(), dev, elapsed.count()});
    }
  }

  if (!data.test.empty()) {
    // The dump always holds every labeled node so any filter can be applied later.
    record.test_predictions = predict_all(model, record.params, data.test, eval::Filter::all);
    record.test_metric = eval::accuracy(record.test_predictions, config.metric);
  }
  return record;
}

RepeatResult repeat_runs(const TrainConfig& config, const task::TaskModel& model, const corpus::Splits<Example>& data,
                         const ParamFactory& init, std::size_t runs, std::size_t jobs,
                         const std::function<void(std::size_t, const EpochLog&)>& on_epoch) {
  if (runs == 0) throw ValidationError("need at least one run");
  RepeatResult result;
  result.runs.resize(runs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mutex;

  const auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= runs) return;
      try {
        TrainConfig c = config;
        c.seed = config.seed + i;
        EpochCallback cb;
        if (on_epoch) {
          cb = [&, i](const EpochLog& log) {
            const std::lock_guard lock(mutex);
            on_epoch(i, log);
          };
        }
        result.runs[i] = train(c, model, data, init(c.seed), cb);
      } catch (...) {
        const std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        next = runs;
      }
    }
  };

  jobs = std::max<std::size_t>(1, std::min(jobs, runs));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> metrics;
  for (const auto& r : result.runs) metrics.push_back(r.test_metric);
  result.test = eval::aggregate(metrics);
  return result;
}

}  // namespace treeseq::train
