#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treeseq/autodiff/param_set.hpp"
#include "treeseq/autodiff/tensor.hpp"

namespace treeseq::ad {

/// Handle to a node inside one Graph.
struct NodeId {
  std::uint32_t index = 0;
  friend bool operator==(NodeId, NodeId) = default;
};

enum class Op : std::uint8_t {
  input,
  param,
  lookup,
  matvec,
  add,
  sub,
  hadamard,
  tanh,
  sigmoid,
  relu,
  concat,
  slice,
  dot,
  scale,
  add_scalar,
  sum,
  softmax_xent,
};

std::string_view op_name(Op op);
/// Throws ValidationError for unknown names.
Op parse_op(std::string_view name);

enum class Elementwise : std::uint8_t { tanh, sigmoid, hadamard, add };

/// Throws ValidationError for unknown kinds.
Elementwise parse_elementwise(std::string_view name);

/// Fault injection for the gradient-check harness: the named op's backward rule
/// emits gradients with flipped sign. Never set outside verification runs.
struct GraphOptions {
  std::optional<Op> flip_backward_sign;
};

enum class BackwardMode : std::uint8_t {
  /// Error if backward already ran on this graph.
  fresh,
  /// Add to node gradients left by a previous backward call.
  accumulate,
};

/// Define-by-run computation graph with reverse-mode differentiation.
///
/// Nodes are appended in creation order, so parents always precede children and
/// a reverse sweep over node indices is a valid reverse topological order.
/// Parameter leaves reference the ParamSet tensors without copying; the
/// ParamSet must outlive the graph and stay unmodified while the graph lives.
class Graph {
 public:
  explicit Graph(GraphOptions options = {}) : options_(options) {}

  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;
  Graph(Graph&&) = default;
  Graph& operator=(Graph&&) = default;

  /// Constant leaf; receives a gradient but feeds no sink.
  NodeId input(Tensor value);
  /// Whole-tensor parameter leaf. Repeated requests return the same node.
  NodeId param(const ParamSet& params, std::string_view name);
  /// One row of a matrix parameter (embedding lookup) as a vector.
  NodeId lookup(const ParamSet& params, std::string_view name, std::size_t row);

  NodeId matvec(NodeId m, NodeId v);
  NodeId elementwise(Elementwise kind, std::span<const NodeId> args);
  NodeId tanh(NodeId x);
  NodeId sigmoid(NodeId x);
  NodeId relu(NodeId x);
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId hadamard(NodeId a, NodeId b);
  NodeId concat(NodeId a, NodeId b);
  NodeId slice(NodeId v, std::size_t offset, std::size_t length);
  /// Scalar (length-1 vector) result.
  NodeId dot(NodeId a, NodeId b);
  NodeId scale(NodeId x, double factor);
  NodeId add_scalar(NodeId x, double offset);
  /// Elementwise sum of same-shaped nodes; at least one term.
  NodeId sum(std::span<const NodeId> terms);
  /// −log softmax(logits)[gold] as a scalar node (log-sum-exp stabilized).
  NodeId softmax_cross_entropy(NodeId logits, std::size_t gold);

  /// References returned by value() and grad() stay valid for the graph's lifetime.
  const Tensor& value(NodeId id) const;
  /// Gradient accumulated by backward; zero tensor before backward runs.
  const Tensor& grad(NodeId id) const;
  Op op(NodeId id) const { return nodes_.at(id.index).op; }
  std::span<const NodeId> parents(NodeId id) const;
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Reverse sweep from a scalar loss. Node gradients are kept for inspection.
  void backward(NodeId loss, BackwardMode mode = BackwardMode::fresh);
  /// Reverse sweep, then adds parameter gradients into `sink` (same layout as
  /// the ParamSet the leaves were created from). Frozen parameters are skipped.
  void backward(NodeId loss, ParamSet& sink, BackwardMode mode = BackwardMode::fresh);

  /// Clears node gradients so backward may run fresh again.
  void reset_grads();

 private:
  struct Node {
    Op op = Op::input;
    std::uint32_t parent_begin = 0;
    std::uint32_t parent_count = 0;
    Tensor value;
    const Tensor* external = nullptr;  // param leaves view ParamSet storage
    Tensor grad;
    std::size_t aux = 0;       // param index, lookup row, slice offset, gold class
    double scalar = 0.0;       // scale factor / offset
    const ParamSet* source = nullptr;
  };

  NodeId push(Node node, std::span<const NodeId> parents);
  const Node& node(NodeId id) const;
  std::string describe(NodeId id) const;
  std::vector<Tensor> begin_sweep(BackwardMode mode);
  void end_sweep(std::vector<Tensor> previous);
  void sweep(NodeId loss);
  void propagate(std::size_t index);
  Tensor& grad_slot(NodeId id);

  GraphOptions options_;
  // Deque keeps value()/grad() references valid while nodes are appended.
  std::deque<Node> nodes_;
  std::vector<NodeId> parent_ids_;
  struct ParamKey {
    const ParamSet* set;
    std::size_t index;
    NodeId node;
  };
  std::vector<ParamKey> param_nodes_;
  bool backward_done_ = false;
};

}  // namespace treeseq::ad
