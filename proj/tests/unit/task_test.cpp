#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "helpers.hpp"
#include "treeseq/autodiff/grad_check.hpp"
#include "treeseq/corpus/embeddings.hpp"
#include "treeseq/corpus/phrases.hpp"
#include "treeseq/corpus/synthetic.hpp"
#include "treeseq/errors.hpp"
#include "treeseq/task/examples.hpp"
#include "treeseq/task/heads.hpp"
#include "treeseq/task/predictions.hpp"
#include "treeseq/task/task_model.hpp"

namespace treeseq::task {
namespace {

using testing::random_matrix;
using testing::random_vector;

TEST(Softmax, UniformLossIsLogClasses) {
  ParamSet ps;
  ps.add("head.U", Tensor::matrix(5, 3));
  ps.add("head.b", Tensor::vector(5));
  Graph g;
  const auto x = g.input(Tensor::from({0.3, -1.0, 2.0}));
  EXPECT_NEAR(g.value(softmax_loss(g, ps, "head", x, 2))[0], std::log(5.0), 1e-12);
  EXPECT_NEAR(std::log(5.0), 1.609438, 1e-6);
  EXPECT_THROW(softmax_loss(g, ps, "head", x, 5), ValidationError);
}

TEST(Softmax, ConfidentLogits) {
  ParamSet ps;
  ps.add("head.U", Tensor::from_rows({{10.0}, {0.0}}));
  ps.add("head.b", Tensor::vector(2));
  Graph g;
  const double loss = g.value(softmax_loss(g, ps, "head", g.input(Tensor::from({1.0})), 0))[0];
  EXPECT_NEAR(loss, std::log1p(std::exp(-10.0)), 1e-15);
  EXPECT_NEAR(loss, 4.54e-5, 1e-7);
}

TEST(Softmax, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    ParamSet ps;
    add_softmax_head(ps, "head", 5, 4, rng);
    ps["head.b"] = random_vector(5, rng);
    ps.add("x", random_vector(4, rng));
    const auto report = ad::grad_check(
        [](Graph& g, const ParamSet& p) { return softmax_loss(g, p, "head", g.param(p, "x"), 3); }, ps, 1e-5);
    EXPECT_LT(report.max_rel_error, 1e-6);
  }
}

TEST(Softmax, ProbabilitiesAndArgmax) {
  const std::vector<double> logits{1000.0, 1000.0, -1000.0};
  const auto p = softmax(logits);
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_EQ(p[2], 0.0);
  EXPECT_EQ(argmax(p), 0U);
}

TEST(DecodeBinary, Examples) {
  EXPECT_EQ(decode_binary(std::vector{0.4, 0.2, 0.1, 0.2, 0.1}), Polarity::negative);
  EXPECT_EQ(decode_binary(std::vector{0.2, 0.2, 0.2, 0.2, 0.2}), Polarity::positive);
  EXPECT_EQ(decode_binary(std::vector{0.0, 0.0, 0.0, 0.0, 1.0}), Polarity::positive);
  EXPECT_THROW(decode_binary(std::vector{0.5, 0.5}), ValidationError);
  EXPECT_THROW(decode_binary(std::vector{0.5, 0.5, 0.5, 0.0, 0.0}), ValidationError);
  EXPECT_EQ(coarse_gold(1), Polarity::negative);
  EXPECT_EQ(coarse_gold(3), Polarity::positive);
  EXPECT_FALSE(coarse_gold(2).has_value());
}

// Σ_u Σ_z max(0, 1 − a_gold·u + a_z·u) in plain arithmetic.
double brute_force_margin(std::span<const Tensor> units, const Tensor& answers, int gold, std::span<const int> negs) {
  const auto score = [&](int answer, const Tensor& u) {
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += answers(static_cast<std::size_t>(answer), k) * u[k];
    return s;
  };
  double total = 0.0;
  for (const auto& u : units) {
    for (const int z : negs) total += std::max(0.0, 1.0 - score(gold, u) + score(z, u));
  }
  return total;
}

TEST(QaMargin, HandExample) {
  ParamSet ps;
  ps.add(std::string(kAnswerParam), Tensor::from_rows({{1.2}, {0.5}}));
  Graph g;
  const std::vector<NodeId> units{g.input(Tensor::from({1.0}))};
  const std::vector<int> negs{1};
  EXPECT_NEAR(g.value(qa_margin_loss(g, ps, units, 0, negs))[0], 0.3, 1e-15);
  ps[kAnswerParam](0, 0) = 2.0;
  Graph h;
  const std::vector<NodeId> units2{h.input(Tensor::from({1.0}))};
  EXPECT_EQ(h.value(qa_margin_loss(h, ps, units2, 0, negs))[0], 0.0);
  EXPECT_THROW(qa_margin_loss(h, ps, units2, 0, {}), ValidationError);
}

TEST(QaMargin, MatchesBruteForceEnumeration) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const std::size_t dim = 1 + rng.below(5);
    const std::size_t answers = 3 + rng.below(6);
    ParamSet ps;
    ps.add(std::string(kAnswerParam), random_matrix(answers, dim, rng));
    std::vector<Tensor> unit_values;
    Graph g;
    std::vector<NodeId> units;
    for (std::size_t u = 0, n = 1 + rng.below(4); u < n; ++u) {
      unit_values.push_back(random_vector(dim, rng));
      units.push_back(g.input(unit_values.back()));
    }
    const int gold = static_cast<int>(rng.below(answers));
    std::vector<int> negs;
    for (std::size_t a = 0; a < answers; ++a) {
      if (static_cast<int>(a) != gold && rng.uniform() < 0.6) negs.push_back(static_cast<int>(a));
    }
    if (negs.empty()) negs.push_back((gold + 1) % static_cast<int>(answers));
    const double got = g.value(qa_margin_loss(g, ps, units, gold, negs))[0];
    EXPECT_NEAR(got, brute_force_margin(unit_values, ps[kAnswerParam], gold, negs), 1e-10);
  }
}

TEST(QaPredict, MatchesBruteForceArgmin) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed + 500);
    const std::size_t dim = 1 + rng.below(5);
    const Tensor answers = random_matrix(8, dim, rng);
    std::vector<Tensor> units;
    for (std::size_t u = 0, n = 1 + rng.below(4); u < n; ++u) units.push_back(random_vector(dim, rng));
    std::vector<int> pool{0, 1, 2, 3, 4, 5, 6, 7};
    rng.shuffle(pool);
    pool.resize(5);
    int best = -1;
    double best_loss = 0.0;
    const auto losses = qa_candidate_losses(units, answers, pool);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      std::vector<int> rest;
      for (const int a : pool) {
        if (a != pool[i]) rest.push_back(a);
      }
      const double loss = brute_force_margin(units, answers, pool[i], rest);
      EXPECT_NEAR(losses[i], loss, 1e-12);
      if (best < 0 || loss < best_loss || (loss == best_loss && pool[i] < best)) {
        best = pool[i];
        best_loss = loss;
      }
    }
    EXPECT_EQ(qa_predict(units, answers, pool), best);
    // Pool order does not matter.
    std::reverse(pool.begin(), pool.end());
    EXPECT_EQ(qa_predict(units, answers, pool), best);
  }
}

TEST(QaPredict, DegenerateAndTies) {
  Rng rng(1);
  const std::vector<Tensor> units{random_vector(3, rng)};
  Tensor answers = random_matrix(5, 3, rng);
  const std::vector<int> one{3};
  EXPECT_EQ(qa_predict(units, answers, one), 3);
  for (std::size_t k = 0; k < 3; ++k) answers(4, k) = answers(1, k);
  // Make the duplicated answer the clear winner.
  for (std::size_t k = 0; k < 3; ++k) answers(1, k) = answers(4, k) = 10.0 * units[0][k];
  const std::vector<int> pool{4, 0, 1, 2};
  EXPECT_EQ(qa_predict(units, answers, pool), 1);
}

TEST(Relation, ArgmaxOfHead) {
  ParamSet ps;
  ps.add("head.U", Tensor::matrix(19, 4));
  ps.add("head.b", Tensor::vector(19));
  const Tensor summary = Tensor::from({0.1, 0.2, -0.3, 0.4});
  EXPECT_EQ(relation_classify(ps, "head", summary), 0U);
  ps["head.U"](7, 3) = 5.0;
  EXPECT_EQ(relation_classify(ps, "head", summary), 7U);
}

TEST(Predictions, IdsAndKinds) {
  EXPECT_EQ(root_id("s3"), "s3:root");
  EXPECT_EQ(phrase_id("s3", 1, 4), "s3:p1-4");
  EXPECT_EQ(word_id("s3", 2), "s3:w2");
  EXPECT_EQ(unit_kind("s3:root"), UnitKind::root);
  EXPECT_EQ(unit_kind("s3:p1-4"), UnitKind::phrase);
  EXPECT_EQ(unit_kind("s3:w2"), UnitKind::word);
  EXPECT_EQ(unit_kind("q17"), UnitKind::root);
}

TEST(Predictions, DumpRoundTripsExactly) {
  Rng rng(3);
  std::vector<Prediction> preds;
  for (int i = 0; i < 50; ++i) {
    Prediction p{"ex" + std::to_string(i), i % 5, (i * 7) % 5, {}};
    for (int k = 0; k < 5; ++k) p.scores.push_back(rng.uniform() / 3.0);
    preds.push_back(p);
  }
  preds[0].scores = {0.1, -0.0, 5e-324};
  std::stringstream io;
  write_predictions(io, preds);
  EXPECT_EQ(read_predictions(io), preds);
}

TEST(Predictions, MalformedDumpsReportLines) {
  std::istringstream dup("a\t0\t0\t1\na\t1\t1\t1\n");
  try {
    read_predictions(dup);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2U);
  }
  std::istringstream bad("a\tx\t0\n");
  EXPECT_THROW(read_predictions(bad), ParseError);
}

struct Fixture {
  corpus::Vocab vocab;
  std::vector<Example> examples;
  TaskOptions options;
};

Fixture make_fixture(TaskKind task, model::ModelKind kind, std::size_t dim, std::uint64_t seed) {
  Fixture f;
  f.options.kind = task;
  f.options.model.kind = kind;
  f.options.model.dim = dim;
  f.options.classes = default_classes(task);
  switch (task) {
    case TaskKind::treebank_sentiment: {
      std::vector<corpus::LabeledTree> trees;
      for (const auto& line : corpus::synthetic_treebank_lines(40, seed)) {
        auto tree = corpus::parse_tree(line, f.vocab);
        if (tree.leaf_count() <= 7) trees.push_back(std::move(tree));
      }
      f.examples = treebank_examples(trees, "t");
      break;
    }
    case TaskKind::pang_sentiment:
      f.examples = sentence_examples(corpus::separable_sentences(6, 2, f.vocab, seed), "s");
      break;
    case TaskKind::qa_match:
      f.examples = qa_examples(corpus::synthetic_qa(6, 6, 4, f.vocab, seed), "q");
      f.options.answers = 6;
      f.options.negatives = 2;
      break;
    case TaskKind::semeval_relation:
      f.examples = relation_examples(corpus::synthetic_relations(6, f.vocab, seed), "r");
      break;
  }
  f.options.model.punctuation = corpus::default_punctuation(f.vocab);
  return f;
}

TEST(TaskModel, EveryArchitectureAndHeadPassesGradCheck) {
  for (const auto task : {TaskKind::treebank_sentiment, TaskKind::pang_sentiment, TaskKind::qa_match,
                          TaskKind::semeval_relation}) {
    for (const auto kind : model::all_model_kinds()) {
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        auto f = make_fixture(task, kind, 3, seed);
        const TaskModel m(f.options);
        Rng rng(seed);
        const ParamSet ps = m.init_params(corpus::random_embeddings(f.vocab.size(), 3, seed, 0.5), rng);
        const auto& ex = f.examples[0];
        ASSERT_LE(ex.tokens.size(), 7U);
        const auto report = ad::grad_check(
            [&](Graph& g, const ParamSet& p) {
              Rng sampler(seed, 9);
              return m.loss(g, p, ex, sampler);
            },
            ps, 1e-4);
        EXPECT_LT(report.max_rel_error, 1e-4) << task_name(task) << " / " << model::model_name(kind);
      }
    }
  }
}

TEST(TaskModel, TreebankPredictionsCoverLabeledNodes) {
  for (const auto kind : {model::ModelKind::tree, model::ModelKind::sequence}) {
    auto f = make_fixture(TaskKind::treebank_sentiment, kind, 4, 2);
    const TaskModel m(f.options);
    Rng rng(2);
    const ParamSet ps = m.init_params(corpus::random_embeddings(f.vocab.size(), 4, 2), rng);
    const auto& ex = f.examples[1];
    const auto all = m.predict(ps, ex);
    EXPECT_EQ(all.size(), ex.tree->size());
    EXPECT_EQ(std::count_if(all.begin(), all.end(), [](const auto& p) { return unit_kind(p.id) == UnitKind::root; }), 1);
    const auto root_only = m.predict(ps, ex, false);
    ASSERT_EQ(root_only.size(), 1U);
    EXPECT_EQ(root_only[0].gold, ex.label);
    const auto root = std::find_if(all.begin(), all.end(), [&](const auto& p) { return p.id == root_id(ex.id); });
    ASSERT_NE(root, all.end());
    EXPECT_EQ(root->scores, root_only[0].scores);
  }
}

TEST(TaskModel, SequencePhrasePredictionReencodesSpan) {
  auto f = make_fixture(TaskKind::treebank_sentiment, model::ModelKind::lstm, 4, 5);
  const TaskModel m(f.options);
  Rng rng(5);
  const ParamSet ps = m.init_params(corpus::random_embeddings(f.vocab.size(), 4, 5), rng);
  const auto& ex = f.examples[0];
  const auto preds = m.predict(ps, ex);
  const auto& tree = *ex.tree;
  const auto tokens = tree.tokens();
  for (std::size_t id = 0; id < tree.size(); ++id) {
    const auto span = tree.node(id).span;
    Example sub;
    sub.id = "sub";
    sub.tokens.assign(tokens.begin() + static_cast<std::ptrdiff_t>(span.begin),
                      tokens.begin() + static_cast<std::ptrdiff_t>(span.end));
    sub.label = *tree.node(id).label;
    EXPECT_EQ(m.predict(ps, sub)[0].scores, preds[id].scores);
  }
}

TEST(TaskModel, QaPredictionScoresAreNegatedLosses) {
  auto f = make_fixture(TaskKind::qa_match, model::ModelKind::bi_sequence, 3, 1);
  const TaskModel m(f.options);
  Rng rng(1);
  const ParamSet ps = m.init_params(corpus::random_embeddings(f.vocab.size(), 3, 1), rng);
  const auto p = m.predict(ps, f.examples[0]).at(0);
  ASSERT_EQ(p.scores.size(), f.examples[0].candidates.size());
  const auto best = std::max_element(p.scores.begin(), p.scores.end()) - p.scores.begin();
  EXPECT_EQ(f.examples[0].candidates[static_cast<std::size_t>(best)], p.predicted);
}

TEST(TaskModel, Validation) {
  auto f = make_fixture(TaskKind::pang_sentiment, model::ModelKind::tree, 3, 1);
  f.examples[0].tree.reset();
  const TaskModel m(f.options);
  EXPECT_THROW(m.check_example(f.examples[0]), ValidationError);
  TaskOptions qa;
  qa.kind = TaskKind::qa_match;
  qa.answers = 1;
  EXPECT_THROW(TaskModel{qa}, ValidationError);
  EXPECT_THROW(parse_task_kind("ner"), ValidationError);
  Rng rng(1);
  EXPECT_THROW(m.init_params(corpus::random_embeddings(f.vocab.size(), 4, 1), rng), ValidationError);
}

TEST(Examples, PhraseExamplesAreUniqueAndTreeless) {
  corpus::Vocab v;
  std::vector<corpus::LabeledTree> trees;
  trees.push_back(corpus::parse_tree("(3 (2 a) (3 b))", v));
  trees.push_back(corpus::parse_tree("(4 (2 a) (4 c))", v));
  const auto ex = treebank_phrase_examples(trees, "p");
  EXPECT_EQ(ex.size(), 5U);
  for (const auto& e : ex) EXPECT_FALSE(e.tree.has_value());
  EXPECT_EQ(std::count_if(ex.begin(), ex.end(), [](const auto& e) { return e.is_root; }), 2);
  const auto sentences = treebank_examples(trees, "s");
  EXPECT_EQ(sentences[1].id, "s1");
  EXPECT_EQ(sentences[1].label, 4);
}

}  // namespace
}  // namespace treeseq::task
