#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "treeseq/errors.hpp"
#include "treeseq/eval/metrics.hpp"
#include "treeseq/eval/table.hpp"
#include "treeseq/random.hpp"

namespace treeseq::eval {
namespace {

Prediction pred(std::string id, int gold, int predicted, std::vector<double> scores = {}) {
  return {std::move(id), gold, predicted, std::move(scores)};
}

// n examples; the first `correct` are right.
std::vector<Prediction> system_with(std::size_t n, std::size_t correct) {
  std::vector<Prediction> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(pred("e" + std::to_string(i), 1, i < correct ? 1 : 0));
  return out;
}

TEST(Accuracy, DirectCounts) {
  EXPECT_EQ(accuracy(system_with(4, 4), Filter::all), 1.0);
  EXPECT_EQ(accuracy(system_with(4, 3), Filter::all), 0.75);
  EXPECT_THROW(accuracy(std::vector<Prediction>{}, Filter::all), ValidationError);
}

TEST(Accuracy, FiltersByUnitKind) {
  const std::vector<Prediction> preds{pred("s:root", 1, 1), pred("s:p0-2", 1, 0), pred("s:w0", 2, 0),
                                      pred("s:w1", 2, 2)};
  EXPECT_EQ(accuracy(preds, Filter::root), 1.0);
  EXPECT_EQ(accuracy(preds, Filter::phrase), 0.5);
  EXPECT_EQ(accuracy(preds, Filter::all), 0.5);
}

TEST(Accuracy, RootCoarseExcludesNeutralGold) {
  // Scores decide the binary call: masses (0+1) vs (3+4).
  const std::vector<double> neg{0.5, 0.2, 0.1, 0.1, 0.1};
  const std::vector<double> pos{0.1, 0.1, 0.1, 0.2, 0.5};
  const std::vector<Prediction> preds{
      pred("a:root", 0, 1, neg),  // negative, decoded negative: correct though the fine class is wrong
      pred("b:root", 4, 3, pos),  // positive, correct
      pred("c:root", 2, 2, pos),  // neutral gold: excluded
      pred("d:root", 3, 0, neg),  // positive gold, decoded negative: wrong
      pred("e:p0-1", 0, 4, pos),  // not a root
  };
  EXPECT_DOUBLE_EQ(accuracy(preds, Filter::root_coarse), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(accuracy(preds, Filter::all_coarse), 2.0 / 4.0);
  EXPECT_DOUBLE_EQ(accuracy(preds, Filter::root), 1.0 / 4.0);
}

TEST(Accuracy, PermutationInvariant) {
  Rng rng(2);
  auto preds = system_with(37, 23);
  const double base = accuracy(preds, Filter::all);
  for (int i = 0; i < 20; ++i) {
    rng.shuffle(preds);
    EXPECT_EQ(accuracy(preds, Filter::all), base);
  }
}

TEST(Aggregate, Examples) {
  const auto constant = aggregate(std::vector{0.5, 0.5, 0.5});
  EXPECT_EQ(constant.mean, 0.5);
  EXPECT_EQ(constant.stddev, 0.0);
  const auto two = aggregate(std::vector{0.8, 0.9});
  EXPECT_NEAR(two.mean, 0.85, 1e-15);
  EXPECT_NEAR(two.stddev, std::sqrt(0.005), 1e-15);
  EXPECT_NEAR(two.stddev, 0.0707, 1e-4);
  EXPECT_EQ(aggregate(std::vector{0.3}).stddev, 0.0);
  EXPECT_THROW(aggregate(std::vector<double>{}), ValidationError);
  EXPECT_EQ(format_mean_std({0.834, 0.003, 20}), "83.4 (0.3)");
}

TEST(Aggregate, MeanWithinRange) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> xs(1 + rng.below(20));
    for (auto& x : xs) x = rng.uniform();
    const auto s = aggregate(xs);
    EXPECT_GE(s.mean, *std::min_element(xs.begin(), xs.end()) - 1e-15);
    EXPECT_LE(s.mean, *std::max_element(xs.begin(), xs.end()) + 1e-15);
    EXPECT_GE(s.stddev, 0.0);
  }
}

TEST(WelchT, HandComputed) {
  // means 2 and 5, variances 1 and 1, n = 3: t = −3 / sqrt(2/3).
  EXPECT_NEAR(welch_t(std::vector{1.0, 2.0, 3.0}, std::vector{4.0, 5.0, 6.0}), -3.0 / std::sqrt(2.0 / 3.0), 1e-12);
  EXPECT_THROW(welch_t(std::vector{1.0}, std::vector{1.0, 2.0}), ValidationError);
}

TEST(Bootstrap, IdenticalSystemsShowNoDifference) {
  const auto a = system_with(100, 61);
  const auto r = bootstrap_test(a, a, Filter::all, 2000, 3);
  EXPECT_GE(r.p_value, 0.5);
  EXPECT_EQ(r.delta, 0.0);
}

TEST(Bootstrap, PerfectVersusCoinFlip) {
  const auto a = system_with(200, 200);
  auto b = system_with(200, 0);
  Rng rng(1);
  for (std::size_t i = 0; i < 200; i += 2) b[i].predicted = 1;
  rng.shuffle(b);
  const auto r = bootstrap_test(a, b, Filter::all, kDefaultResamples, 0);
  EXPECT_DOUBLE_EQ(r.accuracy_b, 0.5);
  EXPECT_LT(r.p_value, 0.01);
  EXPECT_EQ(r.examples, 200U);
  EXPECT_DOUBLE_EQ(r.delta, 0.5);
}

TEST(Bootstrap, DeterministicAcrossRunsAndJobs) {
  auto a = system_with(150, 90);
  auto b = system_with(150, 80);
  Rng rng(8);
  rng.shuffle(b);
  const auto r1 = bootstrap_test(a, b, Filter::all, 3000, 17);
  const auto r2 = bootstrap_test(a, b, Filter::all, 3000, 17);
  const auto r4 = bootstrap_test(a, b, Filter::all, 3000, 17, Sidedness::one_sided, 4);
  EXPECT_EQ(r1.p_value, r2.p_value);
  EXPECT_EQ(r1.p_value, r4.p_value);
}

// Plain re-implementation of the resampling loop.
double oracle_p(const std::vector<int>& diff, std::size_t resamples, std::uint64_t seed, bool two_sided) {
  long long observed = 0;
  for (const int d : diff) observed += d;
  std::size_t count = 0;
  for (std::size_t r = 0; r < resamples; ++r) {
    Rng rng(seed, r);
    long long total = 0;
    for (std::size_t i = 0; i < diff.size(); ++i) total += diff[rng.below(diff.size())];
    const bool extreme = two_sided ? std::llabs(total - observed) >= std::llabs(observed) : total <= 0;
    count += extreme ? 1 : 0;
  }
  return static_cast<double>(count + 1) / static_cast<double>(resamples + 1);
}

TEST(Bootstrap, MatchesResamplingOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed + 40);
    const std::size_t n = 20 + rng.below(60);
    std::vector<Prediction> a, b;
    std::vector<int> diff;
    for (std::size_t i = 0; i < n; ++i) {
      const bool ca = rng.uniform() < 0.7;
      const bool cb = rng.uniform() < 0.6;
      a.push_back(pred("x" + std::to_string(i), 1, ca ? 1 : 0));
      b.push_back(pred("x" + std::to_string(i), 1, cb ? 1 : 0));
      diff.push_back(int(ca) - int(cb));
    }
    rng.shuffle(b);
    for (const bool two : {false, true}) {
      const auto side = two ? Sidedness::two_sided : Sidedness::one_sided;
      EXPECT_EQ(bootstrap_test(a, b, Filter::all, 1000, seed, side).p_value, oracle_p(diff, 1000, seed, two));
    }
  }
}

TEST(Bootstrap, DegradingSecondSystemNeverRaisesP) {
  Rng rng(12);
  auto a = system_with(80, 50);
  auto b = system_with(80, 45);
  rng.shuffle(a);
  double previous = bootstrap_test(a, b, Filter::all, 1000, 5).p_value;
  for (std::size_t i = 0; i < 45; ++i) {
    b[i].predicted = 0;  // correct -> incorrect
    const double p = bootstrap_test(a, b, Filter::all, 1000, 5).p_value;
    EXPECT_LE(p, previous);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
    previous = p;
  }
}

TEST(Bootstrap, RejectsMismatchedSystems) {
  const auto a = system_with(10, 5);
  auto b = system_with(11, 5);
  EXPECT_THROW(bootstrap_test(a, b, Filter::all, 1000), ValidationError);
  b = system_with(10, 5);
  b[3].id = "other";
  EXPECT_THROW(bootstrap_test(a, b, Filter::all, 1000), ValidationError);
  b = system_with(10, 5);
  b[0].gold = 0;
  EXPECT_THROW(bootstrap_test(a, b, Filter::all, 1000), ValidationError);
  EXPECT_THROW(bootstrap_test(a, a, Filter::all, 999), ValidationError);
}

TEST(Table, SmallestTsv) {
  const Table t{{"root", "all"}, {{"tree", {"0.433", "0.801"}, std::nullopt}}};
  EXPECT_EQ(emit_table(t, TableFormat::tsv), "system\troot\tall\tp\tsig\ntree\t0.433\t0.801\t\t\n");
}

TEST(Table, StarIsStrict) {
  EXPECT_EQ(significance_mark(0.042), "*");
  EXPECT_EQ(significance_mark(0.05), "");
  EXPECT_EQ(significance_mark(0.0499999), "*");
}

TEST(Table, DeltaCells) {
  EXPECT_EQ(format_with_delta(0.712, 0.712 - 0.748), "0.712 (-0.036)");
  EXPECT_EQ(format_with_delta(0.5, -1e-9), "0.500 (0.000)");
  EXPECT_EQ(format_metric(0.4335), "0.433");
}

TEST(Table, JsonAndTsvAgree) {
  const Table t{{"root", "phrase"},
                {{"seq", {"0.420", "83.4 (0.3)"}, 0.042}, {"tree", {"0.433", "0.801"}, 0.05}, {"x", {"1", "2"}, {}}}};
  const auto json = nlohmann::json::parse(emit_table(t, TableFormat::json));
  std::istringstream tsv(emit_table(t, TableFormat::tsv));
  std::string line;
  std::getline(tsv, line);
  std::vector<std::string> header;
  for (auto& c : json["columns"]) header.push_back(c.get<std::string>());
  std::string joined;
  for (const auto& h : header) joined += (joined.empty() ? "" : "\t") + h;
  EXPECT_EQ(line, joined);
  for (const auto& row : json["rows"]) {
    ASSERT_TRUE(std::getline(tsv, line));
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, '\t');) cells.push_back(c);
    if (line.back() == '\t') cells.emplace_back();
    ASSERT_EQ(cells.size(), header.size());
    for (std::size_t i = 0; i < header.size(); ++i) {
      const auto& v = row[header[i]];
      if (v.is_number()) {
        EXPECT_EQ(v.get<double>(), std::stod(cells[i])) << header[i];
      } else if (v.is_null()) {
        EXPECT_EQ(cells[i], "");
      } else {
        EXPECT_EQ(v.get<std::string>(), cells[i]);
      }
    }
  }
  EXPECT_EQ(json["rows"][0]["sig"], "*");
  EXPECT_EQ(json["rows"][1]["sig"], "");
}

TEST(Table, RaggedRowsRejected) {
  const Table t{{"a", "b"}, {{"s", {"1"}, {}}}};
  EXPECT_THROW(emit_table(t, TableFormat::tsv), ValidationError);
  EXPECT_THROW(parse_table_format("xml"), ValidationError);
  EXPECT_EQ(parse_filter("root-coarse"), Filter::root_coarse);
  EXPECT_THROW(parse_filter("nodes"), ValidationError);
}

}  // namespace
}  // namespace treeseq::eval
