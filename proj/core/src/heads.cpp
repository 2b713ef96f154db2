#include "treeseq/task/heads.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "treeseq/errors.hpp"
#include "treeseq/model/encoders.hpp"

namespace treeseq::task {

namespace {

std::string join_name(std::string_view prefix, std::string_view leaf) {
  return std::string(prefix) + "." + std::string(leaf);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("dot of lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

void add_softmax_head(ParamSet& params, std::string_view prefix, std::size_t classes, std::size_t dim, Rng& rng) {
  if (classes < 2) throw ValidationError("a softmax head needs at least 2 classes");
  params.add(join_name(prefix, "U"), model::glorot_uniform(classes, dim, rng));
  params.add(join_name(prefix, "b"), Tensor::vector(classes));
}

NodeId softmax_logits(Graph& graph, const ParamSet& params, std::string_view prefix, NodeId x) {
  const NodeId u = graph.param(params, join_name(prefix, "U"));
  const NodeId b = graph.param(params, join_name(prefix, "b"));
  return graph.add(graph.matvec(u, x), b);
}

NodeId softmax_loss(Graph& graph, const ParamSet& params, std::string_view prefix, NodeId x, std::size_t gold) {
  const std::size_t classes = params[join_name(prefix, "b")].size();
  if (gold >= classes) {
    throw ValidationError("gold class " + std::to_string(gold) + " outside [0, " + std::to_string(classes) + ")");
  }
  return graph.softmax_cross_entropy(softmax_logits(graph, params, prefix, x), gold);
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) return {};
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    total += out[i];
  }
  for (double& p : out) p /= total;
  return out;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw ValidationError("argmax of an empty vector");
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

Polarity decode_binary(std::span<const double> probs) {
  if (probs.size() != 5) throw ValidationError("binary decoding needs 5 class probabilities");
  double total = 0.0;
  for (const double p : probs) {
    if (!(p >= 0.0)) throw ValidationError("probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-6) throw ValidationError("probabilities are not normalized");
  const double negative = probs[0] + probs[1];
  const double positive = probs[3] + probs[4];
  return negative > positive ? Polarity::negative : Polarity::positive;
}

std::optional<Polarity> coarse_gold(int fine_label) {
  if (fine_label < 2) return Polarity::negative;
  if (fine_label > 2) return Polarity::positive;
  return std::nullopt;
}

void add_answer_table(ParamSet& params, std::size_t answers, std::size_t dim, Rng& rng) {
  params.add(std::string(kAnswerParam), model::glorot_uniform(answers, dim, rng));
}

NodeId qa_margin_loss(Graph& graph, const ParamSet& params, std::span<const NodeId> units, int gold,
                      std::span<const int> negatives) {
  if (negatives.empty()) throw ValidationError("margin loss needs at least one negative answer");
  if (units.empty()) throw ValidationError("margin loss needs at least one unit");
  const NodeId correct = graph.lookup(params, kAnswerParam, static_cast<std::size_t>(gold));
  std::vector<NodeId> wrong;
  wrong.reserve(negatives.size());
  for (const int z : negatives) wrong.push_back(graph.lookup(params, kAnswerParam, static_cast<std::size_t>(z)));
  std::vector<NodeId> terms;
  terms.reserve(units.size() * negatives.size());
  for (const NodeId e : units) {
    const NodeId good = graph.dot(correct, e);
    for (const NodeId z : wrong) {
      terms.push_back(graph.relu(graph.add_scalar(graph.sub(graph.dot(z, e), good), 1.0)));
    }
  }
  return graph.sum(terms);
}

std::vector<double> qa_candidate_losses(std::span<const Tensor> units, const Tensor& answers,
                                        std::span<const int> pool) {
  // scores[u][k] = a_{pool[k]} · e_u
  std::vector<std::vector<double>> scores(units.size(), std::vector<double>(pool.size()));
  for (std::size_t u = 0; u < units.size(); ++u) {
    for (std::size_t k = 0; k < pool.size(); ++k) {
      scores[u][k] = dot(answers.row(static_cast<std::size_t>(pool[k])), units[u].data());
    }
  }
  std::vector<double> losses(pool.size(), 0.0);
  for (std::size_t c = 0; c < pool.size(); ++c) {
    for (const auto& row : scores) {
      for (std::size_t z = 0; z < pool.size(); ++z) {
        if (z != c) losses[c] += std::max(0.0, 1.0 - row[c] + row[z]);
      }
    }
  }
  return losses;
}

int qa_predict(std::span<const Tensor> units, const Tensor& answers, std::span<const int> pool) {
  if (pool.empty()) throw ValidationError("candidate pool is empty");
  const auto losses = qa_candidate_losses(units, answers, pool);
  std::size_t best = 0;
  for (std::size_t k = 1; k < pool.size(); ++k) {
    if (losses[k] < losses[best] || (losses[k] == losses[best] && pool[k] < pool[best])) best = k;
  }
  return pool[best];
}

std::vector<double> head_logits(const ParamSet& params, std::string_view prefix, const Tensor& x) {
  const Tensor& u = params[join_name(prefix, "U")];
  const Tensor& b = params[join_name(prefix, "b")];
  if (u.cols() != x.size()) {
    throw DimensionError("head " + u.shape_string() + " applied to vector of length " + std::to_string(x.size()));
  }
  std::vector<double> logits(b.data().begin(), b.data().end());
  for (std::size_t c = 0; c < logits.size(); ++c) logits[c] += dot(u.row(c), x.data());
  return logits;
}

std::size_t relation_classify(const ParamSet& params, std::string_view prefix, const Tensor& summary) {
  return argmax(head_logits(params, prefix, summary));
}

}  // namespace treeseq::task
