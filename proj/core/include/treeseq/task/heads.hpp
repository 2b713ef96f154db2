#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treeseq/autodiff/graph.hpp"
#include "treeseq/autodiff/param_set.hpp"
#include "treeseq/random.hpp"

namespace treeseq::task {

using ad::Graph;
using ad::NodeId;
using ad::ParamSet;
using ad::Tensor;

/// Adds `<prefix>.U` (classes x dim, Glorot) and `<prefix>.b` (zeros).
void add_softmax_head(ParamSet& params, std::string_view prefix, std::size_t classes, std::size_t dim, Rng& rng);

/// U·x + b
NodeId softmax_logits(Graph& graph, const ParamSet& params, std::string_view prefix, NodeId x);
/// −log softmax(U·x + b)[gold]. Throws ValidationError when gold is out of range.
NodeId softmax_loss(Graph& graph, const ParamSet& params, std::string_view prefix, NodeId x, std::size_t gold);

/// Log-sum-exp stabilized probabilities.
std::vector<double> softmax(std::span<const double> logits);
/// First index of the maximum.
std::size_t argmax(std::span<const double> values);

enum class Polarity { negative, positive };

/// Compares mass(0)+mass(1) with mass(3)+mass(4) of a 5-class distribution;
/// class 2 is ignored and ties go to positive. Throws ValidationError when the
/// input is not 5 probabilities summing to 1 within 1e-6.
Polarity decode_binary(std::span<const double> probs);
/// Coarse gold label of a fine class: 0-1 negative, 3-4 positive, none for 2.
std::optional<Polarity> coarse_gold(int fine_label);

/// Name of the answers x dim answer embedding table.
inline constexpr std::string_view kAnswerParam = "ans.A";

void add_answer_table(ParamSet& params, std::size_t answers, std::size_t dim, Rng& rng);

/// Σ_u Σ_z max(0, 1 − a_gold·e_u + a_z·e_u) over the given units and negatives.
/// Throws ValidationError when `negatives` is empty.
NodeId qa_margin_loss(Graph& graph, const ParamSet& params, std::span<const NodeId> units, int gold,
                      std::span<const int> negatives);

/// Loss of each pool candidate taken as the correct answer, the rest of the
/// pool acting as negatives. Plain arithmetic on unit values.
std::vector<double> qa_candidate_losses(std::span<const Tensor> units, const Tensor& answers,
                                        std::span<const int> pool);
/// Candidate with the lowest loss; ties go to the lowest answer id.
int qa_predict(std::span<const Tensor> units, const Tensor& answers, std::span<const int> pool);

/// Argmax class of a softmax head applied to `summary`.
std::size_t relation_classify(const ParamSet& params, std::string_view prefix, const Tensor& summary);
/// U·x + b computed outside a graph.
std::vector<double> head_logits(const ParamSet& params, std::string_view prefix, const Tensor& x);

}  // namespace treeseq::task
