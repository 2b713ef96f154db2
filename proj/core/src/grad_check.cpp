#include "treeseq/autodiff/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "treeseq/errors.hpp"

namespace treeseq::ad {

namespace {

double evaluate(const Objective& objective, const ParamSet& params) {
  Graph graph;
  const NodeId loss = objective(graph, params);
  const double value = graph.value(loss)[0];
  if (!std::isfinite(value)) throw NumericError("objective returned a non-finite value");
  return value;
}

}  // namespace

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
}

GradCheckReport grad_check(const Objective& objective, const ParamSet& params, double step,
                           GraphOptions options) {
  if (!(step > 0.0)) throw ValidationError("grad_check step must be positive");

  ParamSet analytic = params.zeros_like();
  {
    Graph graph(options);
    const NodeId loss = objective(graph, params);
    if (!std::isfinite(graph.value(loss)[0])) throw NumericError("objective returned a non-finite value");
    graph.backward(loss, analytic);
  }

  GradCheckReport report;
  ParamSet probe = params;
  for (std::size_t p = 0; p < probe.size(); ++p) {
    if (!probe.at(p).info.trainable) continue;
    TensorCheck check;
    check.name = probe.at(p).name;
    Tensor& theta = probe.at(p).value;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double original = theta[i];
      theta[i] = original + step;
      const double up = evaluate(objective, probe);
      theta[i] = original - step;
      const double down = evaluate(objective, probe);
      theta[i] = original;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic.at(p).value[i];
      const double err = relative_error(a, numeric);
      if (i == 0 || err > check.max_rel_error) {
        check.max_rel_error = err;
        check.worst_index = i;
        check.analytic = a;
        check.numeric = numeric;
      }
    }
    report.max_rel_error = std::max(report.max_rel_error, check.max_rel_error);
    report.tensors.push_back(std::move(check));
  }
  return report;
}

}  // namespace treeseq::ad
