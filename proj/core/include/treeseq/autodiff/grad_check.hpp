#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "treeseq/autodiff/graph.hpp"
#include "treeseq/autodiff/param_set.hpp"

namespace treeseq::ad {

/// Builds a scalar loss for the given parameters inside a fresh graph.
using Objective = std::function<NodeId(Graph&, const ParamSet&)>;

struct TensorCheck {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::vector<TensorCheck> tensors;

  bool passed(double tolerance) const { return max_rel_error < tolerance; }
};

/// |a − n| / max(1e-8, |a| + |n|)
double relative_error(double analytic, double numeric);

/// Compares reverse-mode gradients against central differences
/// (f(θ+s) − f(θ−s)) / 2s for every coordinate of every trainable tensor.
/// `options` is forwarded to the graph used for the analytic pass only.
GradCheckReport grad_check(const Objective& objective, const ParamSet& params, double step,
                           GraphOptions options = {});

}  // namespace treeseq::ad
