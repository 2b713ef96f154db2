#include "treeseq/autodiff/graph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "treeseq/errors.hpp"

namespace treeseq::ad {

namespace {

constexpr std::array<std::pair<Op, std::string_view>, 17> kOpNames{{
    {Op::input, "input"},
    {Op::param, "param"},
    {Op::lookup, "lookup"},
    {Op::matvec, "matvec"},
    {Op::add, "add"},
    {Op::sub, "sub"},
    {Op::hadamard, "hadamard"},
    {Op::tanh, "tanh"},
    {Op::sigmoid, "sigmoid"},
    {Op::relu, "relu"},
    {Op::concat, "concat"},
    {Op::slice, "slice"},
    {Op::dot, "dot"},
    {Op::scale, "scale"},
    {Op::add_scalar, "add_scalar"},
    {Op::sum, "sum"},
    {Op::softmax_xent, "softmax_xent"},
}};

double sigmoid_of(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

std::string_view op_name(Op op) {
  for (const auto& [o, name] : kOpNames) {
    if (o == op) return name;
  }
  return "unknown";
}

Op parse_op(std::string_view name) {
  for (const auto& [o, n] : kOpNames) {
    if (n == name) return o;
  }
  throw ValidationError("unknown op '" + std::string(name) + "'");
}

Elementwise parse_elementwise(std::string_view name) {
  if (name == "tanh") return Elementwise::tanh;
  if (name == "sigmoid") return Elementwise::sigmoid;
  if (name == "hadamard") return Elementwise::hadamard;
  if (name == "add") return Elementwise::add;
  throw ValidationError("unknown elementwise kind '" + std::string(name) + "'");
}

NodeId Graph::push(Node n, std::span<const NodeId> parents) {
  n.parent_begin = static_cast<std::uint32_t>(parent_ids_.size());
  n.parent_count = static_cast<std::uint32_t>(parents.size());
  parent_ids_.insert(parent_ids_.end(), parents.begin(), parents.end());
  nodes_.push_back(std::move(n));
  return NodeId{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

const Graph::Node& Graph::node(NodeId id) const {
  if (id.index >= nodes_.size()) throw ValidationError("node id out of range");
  return nodes_[id.index];
}

std::string Graph::describe(NodeId id) const {
  return std::string(op_name(node(id).op)) + value(id).shape_string();
}

const Tensor& Graph::value(NodeId id) const {
  const Node& n = node(id);
  return n.external != nullptr ? *n.external : n.value;
}

const Tensor& Graph::grad(NodeId id) const {
  const Node& n = node(id);
  if (n.grad.empty()) {
    // Unreached nodes report a zero gradient of the right shape.
    const_cast<Node&>(n).grad = value(id).is_vector() ? Tensor::vector(value(id).size())
                                                       : Tensor::matrix(value(id).rows(), value(id).cols());
  }
  return n.grad;
}

std::span<const NodeId> Graph::parents(NodeId id) const {
  const Node& n = node(id);
  return {parent_ids_.data() + n.parent_begin, n.parent_count};
}

NodeId Graph::input(Tensor value) {
  if (value.empty()) throw DimensionError("input tensor has no shape");
  Node n;
  n.op = Op::input;
  n.value = std::move(value);
  return push(std::move(n), {});
}

NodeId Graph::param(const ParamSet& params, std::string_view name) {
  const std::size_t index = params.index(name);
  for (const auto& key : param_nodes_) {
    if (key.set == &params && key.index == index) return key.node;
  }
  Node n;
  n.op = Op::param;
  n.external = &params.at(index).value;
  n.aux = index;
  n.source = &params;
  const NodeId id = push(std::move(n), {});
  param_nodes_.push_back({&params, index, id});
  return id;
}

NodeId Graph::lookup(const ParamSet& params, std::string_view name, std::size_t row) {
  const std::size_t index = params.index(name);
  const Tensor& table = params.at(index).value;
  if (!table.is_matrix()) throw DimensionError("lookup needs a matrix parameter, got " + table.shape_string());
  if (row >= table.rows()) {
    throw DimensionError("lookup row " + std::to_string(row) + " outside " + table.shape_string());
  }
  Node n;
  n.op = Op::lookup;
  const auto r = table.row(row);
  n.value = Tensor::from(std::vector<double>(r.begin(), r.end()));
  n.aux = row;
  n.scalar = static_cast<double>(index);
  n.source = &params;
  return push(std::move(n), {});
}

NodeId Graph::matvec(NodeId m, NodeId v) {
  const Tensor& mat = value(m);
  const Tensor& vec = value(v);
  if (!mat.is_matrix() || !vec.is_vector() || mat.cols() != vec.size()) {
    throw DimensionError("matvec shape mismatch: matrix " + mat.shape_string() + " vs vector " +
                         vec.shape_string());
  }
  Tensor out = Tensor::vector(mat.rows());
  const std::size_t cols = mat.cols();
  const double* md = mat.data().data();
  const double* vd = vec.data().data();
  for (std::size_t i = 0; i < mat.rows(); ++i) {
    double acc = 0.0;
    const double* row = md + i * cols;
    for (std::size_t j = 0; j < cols; ++j) acc += row[j] * vd[j];
    out[i] = acc;
  }
  Node n;
  n.op = Op::matvec;
  n.value = std::move(out);
  const std::array<NodeId, 2> ps{m, v};
  return push(std::move(n), ps);
}

NodeId Graph::elementwise(Elementwise kind, std::span<const NodeId> args) {
  const std::size_t arity = (kind == Elementwise::tanh || kind == Elementwise::sigmoid) ? 1 : 2;
  if (args.size() != arity) {
    throw ValidationError("elementwise op expects " + std::to_string(arity) + " arguments, got " +
                          std::to_string(args.size()));
  }
  switch (kind) {
    case Elementwise::tanh: return tanh(args[0]);
    case Elementwise::sigmoid: return sigmoid(args[0]);
    case Elementwise::hadamard: return hadamard(args[0], args[1]);
    case Elementwise::add: return add(args[0], args[1]);
  }
  throw ValidationError("unknown elementwise kind");
}

NodeId Graph::tanh(NodeId x) {
  Node n;
  n.op = Op::tanh;
  n.value = value(x);
  for (double& v : n.value.data()) v = std::tanh(v);
  return push(std::move(n), std::array{x});
}

NodeId Graph::sigmoid(NodeId x) {
  Node n;
  n.op = Op::sigmoid;
  n.value = value(x);
  for (double& v : n.value.data()) v = sigmoid_of(v);
  return push(std::move(n), std::array{x});
}

NodeId Graph::relu(NodeId x) {
  Node n;
  n.op = Op::relu;
  n.value = value(x);
  for (double& v : n.value.data()) v = v > 0.0 ? v : 0.0;
  return push(std::move(n), std::array{x});
}

NodeId Graph::add(NodeId a, NodeId b) {
  const Tensor& va = value(a);
  const Tensor& vb = value(b);
  if (!va.same_shape(vb)) throw DimensionError("add shape mismatch: " + describe(a) + " vs " + describe(b));
  Node n;
  n.op = Op::add;
  n.value = va;
  n.value.add(vb);
  return push(std::move(n), std::array{a, b});
}

NodeId Graph::sub(NodeId a, NodeId b) {
  const Tensor& va = value(a);
  const Tensor& vb = value(b);
  if (!va.same_shape(vb)) throw DimensionError("sub shape mismatch: " + describe(a) + " vs " + describe(b));
  Node n;
  n.op = Op::sub;
  n.value = va;
  for (std::size_t i = 0; i < vb.size(); ++i) n.value[i] -= vb[i];
  return push(std::move(n), std::array{a, b});
}

NodeId Graph::hadamard(NodeId a, NodeId b) {
  const Tensor& va = value(a);
  const Tensor& vb = value(b);
  if (!va.same_shape(vb)) {
    throw DimensionError("hadamard shape mismatch: " + describe(a) + " vs " + describe(b));
  }
  Node n;
  n.op = Op::hadamard;
  n.value = va;
  for (std::size_t i = 0; i < vb.size(); ++i) n.value[i] *= vb[i];
  return push(std::move(n), std::array{a, b});
}

NodeId Graph::concat(NodeId a, NodeId b) {
  const Tensor& va = value(a);
  const Tensor& vb = value(b);
  if (!va.is_vector() || !vb.is_vector()) {
    throw DimensionError("concat needs vectors: " + describe(a) + ", " + describe(b));
  }
  std::vector<double> data(va.data().begin(), va.data().end());
  data.insert(data.end(), vb.data().begin(), vb.data().end());
  Node n;
  n.op = Op::concat;
  n.value = Tensor::from(std::move(data));
  n.aux = va.size();
  return push(std::move(n), std::array{a, b});
}

NodeId Graph::slice(NodeId v, std::size_t offset, std::size_t length) {
  const Tensor& vv = value(v);
  if (!vv.is_vector() || length == 0 || offset + length > vv.size()) {
    throw DimensionError("slice [" + std::to_string(offset) + ", " + std::to_string(offset + length) +
                         ") outside " + describe(v));
  }
  const auto d = vv.data().subspan(offset, length);
  Node n;
  n.op = Op::slice;
  n.value = Tensor::from(std::vector<double>(d.begin(), d.end()));
  n.aux = offset;
  return push(std::move(n), std::array{v});
}

NodeId Graph::dot(NodeId a, NodeId b) {
  const Tensor& va = value(a);
  const Tensor& vb = value(b);
  if (!va.is_vector() || !vb.is_vector() || va.size() != vb.size()) {
    throw DimensionError("dot length mismatch: " + describe(a) + " vs " + describe(b));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) acc += va[i] * vb[i];
  Node n;
  n.op = Op::dot;
  n.value = Tensor::vector(1, acc);
  return push(std::move(n), std::array{a, b});
}

NodeId Graph::scale(NodeId x, double factor) {
  Node n;
  n.op = Op::scale;
  n.value = value(x);
  n.value.scale(factor);
  n.scalar = factor;
  return push(std::move(n), std::array{x});
}

NodeId Graph::add_scalar(NodeId x, double offset) {
  Node n;
  n.op = Op::add_scalar;
  n.value = value(x);
  for (double& v : n.value.data()) v += offset;
  n.scalar = offset;
  return push(std::move(n), std::array{x});
}

NodeId Graph::sum(std::span<const NodeId> terms) {
  if (terms.empty()) throw ValidationError("sum needs at least one term");
  Node n;
  n.op = Op::sum;
  n.value = value(terms[0]);
  for (std::size_t i = 1; i < terms.size(); ++i) {
    const Tensor& t = value(terms[i]);
    if (!t.same_shape(n.value)) {
      throw DimensionError("sum shape mismatch: " + describe(terms[0]) + " vs " + describe(terms[i]));
    }
    n.value.add(t);
  }
  return push(std::move(n), terms);
}

NodeId Graph::softmax_cross_entropy(NodeId logits, std::size_t gold) {
  const Tensor& z = value(logits);
  if (!z.is_vector()) throw DimensionError("softmax needs a vector, got " + describe(logits));
  if (gold >= z.size()) {
    throw ValidationError("gold class " + std::to_string(gold) + " outside " + std::to_string(z.size()) +
                          " classes");
  }
  double top = z[0];
  for (double v : z.data()) top = std::max(top, v);
  // Shifting by the gold logit when it is the maximum keeps relative precision for confident predictions.
  const double shift = z[gold] == top ? z[gold] : top;
  double others = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (i != gold) others += std::exp(z[i] - shift);
  }
  const double loss = z[gold] == top ? std::log1p(others) : top - z[gold] + std::log(others + std::exp(z[gold] - top));
  Node n;
  n.op = Op::softmax_xent;
  n.value = Tensor::vector(1, loss);
  n.aux = gold;
  return push(std::move(n), std::array{logits});
}

Tensor& Graph::grad_slot(NodeId id) {
  Node& n = nodes_[id.index];
  if (n.grad.empty()) {
    const Tensor& v = value(id);
    n.grad = v.is_vector() ? Tensor::vector(v.size()) : Tensor::matrix(v.rows(), v.cols());
  }
  return n.grad;
}

void Graph::reset_grads() {
  for (Node& n : nodes_) n.grad = Tensor{};
  backward_done_ = false;
}

std::vector<Tensor> Graph::begin_sweep(BackwardMode mode) {
  std::vector<Tensor> previous;
  if (!backward_done_) return previous;
  if (mode == BackwardMode::fresh) {
    throw ValidationError("backward already ran on this graph; reset_grads() or request accumulation");
  }
  // Sweep on clean slots, then fold the earlier gradients back in.
  previous.reserve(nodes_.size());
  for (Node& n : nodes_) previous.push_back(std::exchange(n.grad, Tensor{}));
  backward_done_ = false;
  return previous;
}

void Graph::end_sweep(std::vector<Tensor> previous) {
  for (std::size_t i = 0; i < previous.size(); ++i) {
    if (previous[i].empty()) continue;
    if (nodes_[i].grad.empty()) {
      nodes_[i].grad = std::move(previous[i]);
    } else {
      nodes_[i].grad.add(previous[i]);
    }
  }
}

void Graph::backward(NodeId loss, BackwardMode mode) {
  auto previous = begin_sweep(mode);
  sweep(loss);
  end_sweep(std::move(previous));
}

void Graph::backward(NodeId loss, ParamSet& sink, BackwardMode mode) {
  auto previous = begin_sweep(mode);
  sweep(loss);

  for (std::size_t i = 0; i <= loss.index; ++i) {
    const Node& n = nodes_[i];
    if (n.grad.empty() || (n.op != Op::param && n.op != Op::lookup)) continue;
    if (!sink.same_layout(*n.source)) {
      throw ValidationError("gradient sink layout does not match the parameter set");
    }
    const std::size_t index = n.op == Op::param ? n.aux : static_cast<std::size_t>(n.scalar);
    if (!n.source->at(index).info.trainable) continue;
    auto& entry = sink.at(index);
    if (n.op == Op::param) {
      entry.value.add(n.grad);
    } else {
      auto row = entry.value.row(n.aux);
      for (std::size_t k = 0; k < row.size(); ++k) row[k] += n.grad[k];
    }
  }

  end_sweep(std::move(previous));
}

void Graph::sweep(NodeId loss) {
  const Tensor& lv = value(loss);
  if (!lv.is_vector() || lv.size() != 1) throw DimensionError("backward needs a scalar loss, got " + describe(loss));
  grad_slot(loss)[0] += 1.0;
  for (std::size_t i = loss.index + 1; i-- > 0;) {
    if (nodes_[i].grad.empty()) continue;
    propagate(i);
  }
  backward_done_ = true;
}

void Graph::propagate(std::size_t index) {
  // Copy what is needed before grad_slot() may touch other nodes.
  const Node& n = nodes_[index];
  const Op op = n.op;
  if (op == Op::input || op == Op::param || op == Op::lookup) return;

  const double sign = options_.flip_backward_sign == op ? -1.0 : 1.0;
  const NodeId self{static_cast<std::uint32_t>(index)};
  const auto ps = parents(self);
  const Tensor g = [&] {
    Tensor t = n.grad;
    if (sign < 0.0) t.scale(-1.0);
    return t;
  }();
  const Tensor& y = n.value;

  switch (op) {
    case Op::matvec: {
      const Tensor& m = value(ps[0]);
      const Tensor& v = value(ps[1]);
      const std::size_t rows = m.rows();
      const std::size_t cols = m.cols();
      Tensor& gm = grad_slot(ps[0]);
      for (std::size_t i = 0; i < rows; ++i) {
        const double gi = g[i];
        if (gi == 0.0) continue;
        double* row = gm.data().data() + i * cols;
        for (std::size_t j = 0; j < cols; ++j) row[j] += gi * v[j];
      }
      Tensor& gv = grad_slot(ps[1]);
      for (std::size_t i = 0; i < rows; ++i) {
        const double gi = g[i];
        if (gi == 0.0) continue;
        const double* row = m.data().data() + i * cols;
        for (std::size_t j = 0; j < cols; ++j) gv[j] += row[j] * gi;
      }
      break;
    }
    case Op::add:
      grad_slot(ps[0]).add(g);
      grad_slot(ps[1]).add(g);
      break;
    case Op::sub: {
      grad_slot(ps[0]).add(g);
      Tensor& gb = grad_slot(ps[1]);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
      break;
    }
    case Op::hadamard: {
      const Tensor& a = value(ps[0]);
      const Tensor& b = value(ps[1]);
      Tensor& ga = grad_slot(ps[0]);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * b[i];
      Tensor& gb = grad_slot(ps[1]);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * a[i];
      break;
    }
    case Op::tanh: {
      Tensor& gx = grad_slot(ps[0]);
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * (1.0 - y[i] * y[i]);
      break;
    }
    case Op::sigmoid: {
      Tensor& gx = grad_slot(ps[0]);
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * y[i] * (1.0 - y[i]);
      break;
    }
    case Op::relu: {
      const Tensor& x = value(ps[0]);
      Tensor& gx = grad_slot(ps[0]);
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (x[i] > 0.0) gx[i] += g[i];
      }
      break;
    }
    case Op::concat: {
      const std::size_t split = n.aux;
      Tensor& ga = grad_slot(ps[0]);
      for (std::size_t i = 0; i < split; ++i) ga[i] += g[i];
      Tensor& gb = grad_slot(ps[1]);
      for (std::size_t i = split; i < g.size(); ++i) gb[i - split] += g[i];
      break;
    }
    case Op::slice: {
      const std::size_t offset = n.aux;
      Tensor& gv = grad_slot(ps[0]);
      for (std::size_t i = 0; i < g.size(); ++i) gv[offset + i] += g[i];
      break;
    }
    case Op::dot: {
      const Tensor& a = value(ps[0]);
      const Tensor& b = value(ps[1]);
      const double g0 = g[0];
      Tensor& ga = grad_slot(ps[0]);
      for (std::size_t i = 0; i < a.size(); ++i) ga[i] += g0 * b[i];
      Tensor& gb = grad_slot(ps[1]);
      for (std::size_t i = 0; i < b.size(); ++i) gb[i] += g0 * a[i];
      break;
    }
    case Op::scale: {
      const double f = n.scalar;
      Tensor& gx = grad_slot(ps[0]);
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += f * g[i];
      break;
    }
    case Op::add_scalar:
      grad_slot(ps[0]).add(g);
      break;
    case Op::sum:
      for (const NodeId p : ps) grad_slot(p).add(g);
      break;
    case Op::softmax_xent: {
      const Tensor& z = value(ps[0]);
      const std::size_t gold = n.aux;
      double top = z[0];
      for (double v : z.data()) top = std::max(top, v);
      double total = 0.0;
      for (double v : z.data()) total += std::exp(v - top);
      Tensor& gz = grad_slot(ps[0]);
      double rest = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) {
        if (i == gold) continue;
        const double p = std::exp(z[i] - top) / total;
        rest += p;
        gz[i] += g[0] * p;
      }
      gz[gold] -= g[0] * rest;
      break;
    }
    case Op::input:
    case Op::param:
    case Op::lookup:
      break;
  }
}

}  // namespace treeseq::ad
