#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "treeseq/autodiff/grad_check.hpp"
#include "treeseq/autodiff/graph.hpp"
#include "treeseq/errors.hpp"

namespace treeseq::ad {
namespace {

using testing::random_matrix;
using testing::random_vector;

// Collapses any vector node into a scalar with fixed random weights.
NodeId project(Graph& g, NodeId x, std::uint64_t seed = 99) {
  const auto w = testing::probe_weights(g.value(x).size(), seed);
  return g.dot(g.input(Tensor::from(w)), x);
}

TEST(Tensor, FactoriesAndShape) {
  const Tensor m = Tensor::from_rows({{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(m.rows(), 2U);
  EXPECT_EQ(m.cols(), 3U);
  EXPECT_EQ(m(1, 2), 6.0);
  EXPECT_EQ(m.shape_string(), "[2x3]");
  EXPECT_THROW(Tensor::vector(0), DimensionError);
  EXPECT_THROW(Tensor::from_rows({{1, 2}, {3}}), DimensionError);
}

TEST(Matvec, IdentityAndHandArithmetic) {
  Graph g;
  const auto eye = g.input(Tensor::from_rows({{1, 0}, {0, 1}}));
  const auto v = g.input(Tensor::from({3, -1}));
  EXPECT_EQ(g.value(g.matvec(eye, v)), Tensor::from({3, -1}));
  const auto m = g.input(Tensor::from_rows({{1, 2}, {0, 1}}));
  const auto ones = g.input(Tensor::from({1, 1}));
  EXPECT_EQ(g.value(g.matvec(m, ones)), Tensor::from({3, 1}));
}

TEST(Matvec, ShapeMismatchNamesBothShapes) {
  Graph g;
  const auto m = g.input(Tensor::matrix(2, 3));
  const auto v = g.input(Tensor::vector(2));
  try {
    g.matvec(m, v);
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("[2x3]"), std::string::npos) << what;
    EXPECT_NE(what.find("[2]"), std::string::npos) << what;
  }
}

TEST(Matvec, GradientWrtMatrixIsOuterProduct) {
  Rng rng(1);
  ParamSet ps;
  ps.add("m", random_matrix(3, 4, rng));
  const Tensor v = random_vector(4, rng);
  const Tensor u = random_vector(3, rng);
  Graph g;
  const auto loss = g.dot(g.matvec(g.param(ps, "m"), g.input(v)), g.input(u));
  ParamSet sink = ps.zeros_like();
  g.backward(loss, sink);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(sink["m"](i, j), u[i] * v[j], 1e-15);
  }
  // Independent central-difference oracle with step 1e-5.
  const auto f = [&](const ParamSet& p) {
    double s = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      double r = 0;
      for (std::size_t j = 0; j < 4; ++j) r += p["m"](i, j) * v[j];
      s += r * u[i];
    }
    return s;
  };
  ParamSet probe = ps;
  for (std::size_t k = 0; k < 12; ++k) {
    const double x = probe["m"][k];
    probe["m"][k] = x + 1e-5;
    const double up = f(probe);
    probe["m"][k] = x - 1e-5;
    const double down = f(probe);
    probe["m"][k] = x;
    EXPECT_NEAR(sink["m"][k], (up - down) / 2e-5, 1e-8);
  }
}

TEST(Elementwise, FixedPoints) {
  Graph g;
  const auto z = g.input(Tensor::vector(3));
  EXPECT_EQ(g.value(g.tanh(z)), Tensor::vector(3));
  EXPECT_EQ(g.value(g.sigmoid(g.input(Tensor::vector(2)))), Tensor::from({0.5, 0.5}));
}

TEST(Elementwise, TanhDerivativeAtHalf) {
  ParamSet ps;
  ps.add("x", Tensor::from({0.5}));
  Graph g;
  const auto y = g.tanh(g.param(ps, "x"));
  ParamSet sink = ps.zeros_like();
  g.backward(g.sum(std::span(&y, 1)), sink);
  // Central difference oracle of tanh itself.
  const double h = 1e-6;
  const double numeric = (std::tanh(0.5 + h) - std::tanh(0.5 - h)) / (2 * h);
  EXPECT_NEAR(numeric, 0.786448, 1e-6);
  EXPECT_NEAR(sink["x"][0], numeric, 1e-9);
}

TEST(Elementwise, DispatchByNameAndErrors) {
  Graph g;
  const auto a = g.input(Tensor::from({1, 2}));
  const auto b = g.input(Tensor::from({3, 4}));
  const std::array<NodeId, 2> ab{a, b};
  EXPECT_EQ(g.value(g.elementwise(parse_elementwise("hadamard"), ab)), Tensor::from({3, 8}));
  EXPECT_EQ(g.value(g.elementwise(parse_elementwise("add"), ab)), Tensor::from({4, 6}));
  EXPECT_THROW(parse_elementwise("cube"), ValidationError);
  const std::array<NodeId, 2> bad{a, g.input(Tensor::from({1, 2, 3}))};
  EXPECT_THROW(g.elementwise(Elementwise::hadamard, bad), DimensionError);
}

TEST(Concat, ValuesSliceInverseAndGradient) {
  Graph g;
  const auto a = g.input(Tensor::from({1, 2}));
  const auto b = g.input(Tensor::from({3}));
  const auto c = g.concat(a, b);
  EXPECT_EQ(g.value(c), Tensor::from({1, 2, 3}));
  EXPECT_EQ(g.value(g.slice(c, 0, 2)), g.value(a));
  EXPECT_EQ(g.value(g.slice(c, 2, 1)), g.value(b));
  EXPECT_THROW(g.concat(a, g.input(Tensor::matrix(1, 1))), DimensionError);

  ParamSet ps;
  ps.add("a", Tensor::from({0.3, -0.2}));
  ps.add("b", Tensor::from({0.7}));
  const Tensor w = Tensor::from({5, 6, 7});
  Graph h;
  const auto loss = h.dot(h.concat(h.param(ps, "a"), h.param(ps, "b")), h.input(w));
  ParamSet sink = ps.zeros_like();
  h.backward(loss, sink);
  EXPECT_EQ(sink["a"], Tensor::from({5, 6}));
  EXPECT_EQ(sink["b"], Tensor::from({7}));
}

TEST(Dot, ValuesAndGradient) {
  Graph g;
  EXPECT_EQ(g.value(g.dot(g.input(Tensor::from({1, 0})), g.input(Tensor::from({0, 1}))))[0], 0.0);
  EXPECT_EQ(g.value(g.dot(g.input(Tensor::from({1, 2})), g.input(Tensor::from({3, 4}))))[0], 11.0);
  EXPECT_THROW(g.dot(g.input(Tensor::from({1, 2})), g.input(Tensor::from({1}))), DimensionError);

  ParamSet ps;
  ps.add("x", Tensor::from({0.4, -1.5, 2.0}));
  Graph h;
  const auto x = h.param(ps, "x");
  ParamSet sink = ps.zeros_like();
  h.backward(h.dot(x, x), sink);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(sink["x"][i], 2 * ps["x"][i]);
}

TEST(Backward, UnusedParameterHasZeroGradient) {
  ParamSet ps;
  ps.add("used", Tensor::from({1.0}));
  ps.add("unused", Tensor::from({1.0, 2.0}));
  Graph g;
  const auto p = g.param(ps, "used");
  ParamSet sink = ps.zeros_like();
  g.backward(g.dot(p, p), sink);
  EXPECT_EQ(sink["unused"], Tensor::vector(2));
}

TEST(Backward, DoubleBackwardIsAnErrorUnlessAccumulating) {
  ParamSet ps;
  ps.add("x", Tensor::from({3.0}));
  Graph g;
  const auto x = g.param(ps, "x");
  const auto loss = g.dot(x, x);
  g.backward(loss);
  EXPECT_THROW(g.backward(loss), ValidationError);
  g.backward(loss, BackwardMode::accumulate);
  EXPECT_DOUBLE_EQ(g.grad(x)[0], 12.0);
  g.reset_grads();
  g.backward(loss);
  EXPECT_DOUBLE_EQ(g.grad(x)[0], 6.0);
}

TEST(Backward, NonScalarLossRejected) {
  Graph g;
  const auto v = g.input(Tensor::from({1, 2}));
  EXPECT_THROW(g.backward(v), DimensionError);
}

TEST(Backward, SharedParameterEqualsTwoCopySum) {
  Rng rng(3);
  const Tensor w = random_matrix(3, 3, rng);
  const Tensor x1 = random_vector(3, rng);
  const Tensor x2 = random_vector(3, rng);
  ParamSet shared;
  shared.add("W", w);
  ParamSet copies;
  copies.add("W1", w);
  copies.add("W2", w);

  Graph g;
  const auto h1 = g.tanh(g.matvec(g.param(shared, "W"), g.input(x1)));
  const auto h2 = g.tanh(g.add(g.matvec(g.param(shared, "W"), h1), g.input(x2)));
  ParamSet gs = shared.zeros_like();
  g.backward(project(g, h2), gs);

  Graph c;
  const auto c1 = c.tanh(c.matvec(c.param(copies, "W1"), c.input(x1)));
  const auto c2 = c.tanh(c.add(c.matvec(c.param(copies, "W2"), c1), c.input(x2)));
  ParamSet gc = copies.zeros_like();
  c.backward(project(c, c2), gc);

  Tensor expected = gc["W1"];
  expected.add(gc["W2"]);
  EXPECT_LT(max_abs_diff(gs["W"], expected), 1e-15);
}

TEST(Backward, AccumulationIsLinearAcrossConsumers) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    ParamSet ps;
    ps.add("x", random_vector(4, rng));
    const Tensor a = random_vector(4, rng);
    const Tensor b = random_vector(4, rng);
    // One node feeding two consumers.
    Graph both;
    const auto t = both.tanh(both.param(ps, "x"));
    const auto l1 = both.dot(t, both.input(a));
    const auto l2 = both.dot(both.sigmoid(t), both.input(b));
    const std::array<NodeId, 2> terms{l1, l2};
    ParamSet g_both = ps.zeros_like();
    both.backward(both.sum(terms), g_both);
    // Each consumer separately.
    ParamSet g_sep = ps.zeros_like();
    {
      Graph one;
      one.backward(one.dot(one.tanh(one.param(ps, "x")), one.input(a)), g_sep);
      Graph two;
      two.backward(two.dot(two.sigmoid(two.tanh(two.param(ps, "x"))), two.input(b)), g_sep);
    }
    EXPECT_LT(max_abs_diff(g_both["x"], g_sep["x"]), 1e-12);
  }
}

TEST(Backward, DeterministicValues) {
  Rng rng(5);
  ParamSet ps;
  ps.add("W", random_matrix(4, 4, rng));
  const Tensor x = random_vector(4, rng);
  const auto run = [&] {
    Graph g;
    auto h = g.input(x);
    for (int i = 0; i < 5; ++i) h = g.tanh(g.matvec(g.param(ps, "W"), h));
    ParamSet sink = ps.zeros_like();
    g.backward(project(g, h), sink);
    return std::pair{g.value(h), sink["W"]};
  };
  EXPECT_EQ(run(), run());
}

TEST(Softmax, CrossEntropyValues) {
  Graph g;
  EXPECT_NEAR(g.value(g.softmax_cross_entropy(g.input(Tensor::vector(5)), 2))[0], std::log(5.0), 1e-15);
  const double expected = std::log1p(std::exp(-10.0));  // hand arithmetic: −log(e^10 / (e^10 + 1))
  EXPECT_NEAR(g.value(g.softmax_cross_entropy(g.input(Tensor::from({10, 0})), 0))[0], expected, 1e-15);
  EXPECT_NEAR(expected, 4.54e-5, 1e-7);
  EXPECT_NEAR(g.value(g.softmax_cross_entropy(g.input(Tensor::from({1000, 0})), 1))[0], 1000.0, 1e-9);
  EXPECT_THROW(g.softmax_cross_entropy(g.input(Tensor::vector(3)), 3), ValidationError);
}

TEST(Softmax, ConfidentPredictionKeepsRelativePrecision) {
  Graph g;
  const NodeId z = g.input(Tensor::from({40, 0, -3}));
  const NodeId loss = g.softmax_cross_entropy(z, 0);
  const double expected = std::log1p(std::exp(-40.0) + std::exp(-43.0));
  EXPECT_GT(g.value(loss)[0], 0.0);
  EXPECT_NEAR(g.value(loss)[0] / expected, 1.0, 1e-14);
  g.backward(loss);
  const double rest = std::exp(-40.0) / (1.0 + std::exp(-40.0) + std::exp(-43.0)) +
                      std::exp(-43.0) / (1.0 + std::exp(-40.0) + std::exp(-43.0));
  EXPECT_NE(g.grad(z)[0], 0.0);
  EXPECT_NEAR(g.grad(z)[0] / -rest, 1.0, 1e-14);
}

// Every op's backward rule through grad_check, 50 seeds.
struct OpCase {
  const char* name;
  std::function<NodeId(Graph&, const ParamSet&)> build;
};

std::vector<OpCase> op_cases() {
  return {
      {"matvec", [](Graph& g, const ParamSet& p) { return project(g, g.matvec(g.param(p, "M"), g.param(p, "a"))); }},
      {"add", [](Graph& g, const ParamSet& p) { return project(g, g.add(g.param(p, "a"), g.param(p, "b"))); }},
      {"sub", [](Graph& g, const ParamSet& p) { return project(g, g.sub(g.param(p, "a"), g.param(p, "b"))); }},
      {"hadamard",
       [](Graph& g, const ParamSet& p) { return project(g, g.hadamard(g.param(p, "a"), g.param(p, "b"))); }},
      {"tanh", [](Graph& g, const ParamSet& p) { return project(g, g.tanh(g.param(p, "a"))); }},
      {"sigmoid", [](Graph& g, const ParamSet& p) { return project(g, g.sigmoid(g.param(p, "a"))); }},
      {"relu", [](Graph& g, const ParamSet& p) { return project(g, g.relu(g.param(p, "a"))); }},
      {"concat", [](Graph& g, const ParamSet& p) { return project(g, g.concat(g.param(p, "a"), g.param(p, "b"))); }},
      {"slice", [](Graph& g, const ParamSet& p) { return project(g, g.slice(g.param(p, "a"), 1, 2)); }},
      {"dot", [](Graph& g, const ParamSet& p) { return g.dot(g.param(p, "a"), g.param(p, "b")); }},
      {"scale", [](Graph& g, const ParamSet& p) { return project(g, g.scale(g.param(p, "a"), -1.7)); }},
      {"add_scalar", [](Graph& g, const ParamSet& p) { return project(g, g.tanh(g.add_scalar(g.param(p, "a"), 0.3))); }},
      {"sum",
       [](Graph& g, const ParamSet& p) {
         const std::array<NodeId, 3> t{g.param(p, "a"), g.param(p, "b"), g.tanh(g.param(p, "a"))};
         return project(g, g.sum(t));
       }},
      {"lookup", [](Graph& g, const ParamSet& p) { return project(g, g.tanh(g.lookup(p, "M", 2))); }},
      {"softmax_xent",
       [](Graph& g, const ParamSet& p) { return g.softmax_cross_entropy(g.matvec(g.param(p, "M"), g.param(p, "a")), 1); }},
  };
}

TEST(GradCheck, EveryBackwardRuleOnFiftySeeds) {
  for (const auto& c : op_cases()) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Rng rng(seed);
      ParamSet ps;
      ps.add("M", random_matrix(4, 4, rng));
      ps.add("a", random_vector(4, rng));
      ps.add("b", random_vector(4, rng));
      const auto report = grad_check(c.build, ps, 1e-4);
      EXPECT_LT(report.max_rel_error, 1e-4) << c.name << " seed " << seed;
    }
  }
}

TEST(GradCheck, LinearFunctionIsExact) {
  ParamSet ps;
  ps.add("w", Tensor::from({0.3, -0.7, 1.1}));
  const Tensor x0 = Tensor::from({2.0, 0.5, -1.0});
  const auto report = grad_check([&](Graph& g, const ParamSet& p) { return g.dot(g.param(p, "w"), g.input(x0)); },
                                 ps, 1e-4);
  EXPECT_LT(report.max_rel_error, 1e-9);
}

TEST(GradCheck, RecurrentChainOfLengthFive) {
  Rng rng(11);
  ParamSet ps;
  ps.add("W", random_matrix(3, 3, rng));
  ps.add("V", random_matrix(3, 3, rng));
  std::vector<Tensor> xs;
  for (int t = 0; t < 5; ++t) xs.push_back(random_vector(3, rng));
  const auto report = grad_check(
      [&](Graph& g, const ParamSet& p) {
        auto h = g.input(Tensor::vector(3));
        for (const auto& x : xs) {
          h = g.tanh(g.add(g.matvec(g.param(p, "W"), h), g.matvec(g.param(p, "V"), g.input(x))));
        }
        return project(g, h);
      },
      ps, 1e-4);
  EXPECT_LT(report.max_rel_error, 1e-4);
}

TEST(GradCheck, LstmStepAllGates) {
  Rng rng(12);
  const std::size_t k = 3;
  ParamSet ps;
  ps.add("W", random_matrix(4 * k, 2 * k, rng));
  ps.add("h", random_vector(k, rng));
  ps.add("c", random_vector(k, rng));
  ps.add("x", random_vector(k, rng));
  const auto report = grad_check(
      [&](Graph& g, const ParamSet& p) {
        const auto z = g.matvec(g.param(p, "W"), g.concat(g.param(p, "h"), g.param(p, "x")));
        const auto i = g.sigmoid(g.slice(z, 0, k));
        const auto f = g.sigmoid(g.slice(z, k, k));
        const auto o = g.sigmoid(g.slice(z, 2 * k, k));
        const auto l = g.tanh(g.slice(z, 3 * k, k));
        const auto c = g.add(g.hadamard(f, g.param(p, "c")), g.hadamard(i, l));
        return project(g, g.hadamard(o, c));
      },
      ps, 1e-4);
  EXPECT_LT(report.max_rel_error, 1e-4);
}

TEST(GradCheck, CorruptedBackwardRuleIsCaught) {
  Rng rng(13);
  ParamSet ps;
  ps.add("W", random_matrix(3, 3, rng));
  ps.add("x", random_vector(3, rng));
  const Objective f = [](Graph& g, const ParamSet& p) { return project(g, g.tanh(g.matvec(g.param(p, "W"), g.param(p, "x")))); };
  GraphOptions fault;
  fault.flip_backward_sign = Op::tanh;
  EXPECT_GT(grad_check(f, ps, 1e-4, fault).max_rel_error, 1e-2);
  EXPECT_LT(grad_check(f, ps, 1e-4).max_rel_error, 1e-4);
}

TEST(GradCheck, RejectsBadStepAndNonFiniteObjective) {
  ParamSet ps;
  ps.add("x", Tensor::from({1.0}));
  const Objective f = [](Graph& g, const ParamSet& p) { return g.dot(g.param(p, "x"), g.param(p, "x")); };
  EXPECT_THROW(grad_check(f, ps, 0.0), ValidationError);
  const Objective inf = [](Graph& g, const ParamSet& p) {
    return g.scale(g.dot(g.param(p, "x"), g.param(p, "x")), INFINITY);
  };
  EXPECT_THROW(grad_check(inf, ps, 1e-4), NumericError);
}

TEST(ParamSetTest, NamesAreUniqueAndOrdered) {
  ParamSet ps;
  ps.add("b", Tensor::vector(1));
  ps.add("a", Tensor::vector(2));
  EXPECT_THROW(ps.add("a", Tensor::vector(1)), ValidationError);
  EXPECT_EQ(ps.at(0).name, "b");
  EXPECT_EQ(ps.scalar_count(), 3U);
  EXPECT_THROW(ps["zzz"], ValidationError);
}

}  // namespace
}  // namespace treeseq::ad
