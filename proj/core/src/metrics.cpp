#include "treeseq/eval/metrics.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "treeseq/errors.hpp"
#include "treeseq/random.hpp"
#include "treeseq/task/heads.hpp"

namespace treeseq::eval {

namespace {

constexpr std::array<std::pair<Filter, std::string_view>, 5> kFilters{{
    {Filter::all, "all"},
    {Filter::root, "root"},
    {Filter::phrase, "phrase"},
    {Filter::all_coarse, "all-coarse"},
    {Filter::root_coarse, "root-coarse"},
}};

bool coarse(Filter f) { return f == Filter::all_coarse || f == Filter::root_coarse; }

}  // namespace

std::string_view filter_name(Filter filter) {
  for (const auto& [f, name] : kFilters) {
    if (f == filter) return name;
  }
  return "unknown";
}

Filter parse_filter(std::string_view name) {
  for (const auto& [f, n] : kFilters) {
    if (n == name) return f;
  }
  throw ValidationError("unknown evaluation filter '" + std::string(name) +
                        "' (expected all, root, phrase, all-coarse or root-coarse)");
}

bool selected(const Prediction& p, Filter filter) {
  const auto kind = task::unit_kind(p.id);
  switch (filter) {
    case Filter::all: return true;
    case Filter::root: return kind == task::UnitKind::root;
    case Filter::phrase: return kind != task::UnitKind::word;
    case Filter::all_coarse: return task::coarse_gold(p.gold).has_value();
    case Filter::root_coarse: return kind == task::UnitKind::root && task::coarse_gold(p.gold).has_value();
  }
  return false;
}

bool correct(const Prediction& p, Filter filter) {
  if (!coarse(filter)) return p.gold == p.predicted;
  const auto gold = task::coarse_gold(p.gold);
  return gold && *gold == task::decode_binary(p.scores);
}

double accuracy(std::span<const Prediction> predictions, Filter filter) {
  std::size_t total = 0;
  std::size_t hits = 0;
  for (const auto& p : predictions) {
    if (!selected(p, filter)) continue;
    ++total;
    if (correct(p, filter)) ++hits;
  }
  if (total == 0) {
    throw ValidationError("no predictions left under filter '" + std::string(filter_name(filter)) + "'");
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

Summary aggregate(std::span<const double> values) {
  if (values.empty()) throw ValidationError("cannot aggregate zero runs");
  Summary s;
  s.count = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.count - 1));
  }
  return s;
}

double welch_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw ValidationError("t statistic needs at least 2 runs per system");
  const auto sa = aggregate(a);
  const auto sb = aggregate(b);
  const double se = std::sqrt(sa.stddev * sa.stddev / static_cast<double>(sa.count) +
                              sb.stddev * sb.stddev / static_cast<double>(sb.count));
  const double diff = sa.mean - sb.mean;
  if (se == 0.0) return diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
  return diff / se;
}

ComparisonReport bootstrap_test(std::span<const Prediction> a, std::span<const Prediction> b, Filter filter,
                                std::size_t resamples, std::uint64_t seed, Sidedness sidedness, std::size_t jobs) {
  if (resamples < kMinResamples) {
    throw ValidationError("bootstrap needs at least " + std::to_string(kMinResamples) + " resamples");
  }
  std::unordered_map<std::string_view, const Prediction*> by_id;
  for (const auto& p : b) {
    if (selected(p, filter)) by_id.emplace(p.id, &p);
  }
  // Per-example correctness difference, paired by id.
  std::vector<int> diff;
  std::size_t hits_a = 0;
  std::size_t hits_b = 0;
  for (const auto& pa : a) {
    if (!selected(pa, filter)) continue;
    const auto it = by_id.find(pa.id);
    if (it == by_id.end()) throw ValidationError("example '" + pa.id + "' is missing from the second system");
    if (it->second->gold != pa.gold) throw ValidationError("gold labels differ for example '" + pa.id + "'");
    const int ca = correct(pa, filter) ? 1 : 0;
    const int cb = correct(*it->second, filter) ? 1 : 0;
    hits_a += static_cast<std::size_t>(ca);
    hits_b += static_cast<std::size_t>(cb);
    diff.push_back(ca - cb);
  }
  if (diff.size() != by_id.size()) throw ValidationError("the two systems cover different example ids");
  if (diff.empty()) throw ValidationError("no shared predictions under the filter");

  ComparisonReport report;
  const auto n = diff.size();
  report.examples = n;
  report.resamples = resamples;
  report.seed = seed;
  report.sidedness = sidedness;
  report.accuracy_a = static_cast<double>(hits_a) / static_cast<double>(n);
  report.accuracy_b = static_cast<double>(hits_b) / static_cast<double>(n);
  report.delta = report.accuracy_a - report.accuracy_b;
  // Integer bookkeeping keeps counts exact: observed Σdiff = hits_a − hits_b.
  const auto observed = static_cast<long long>(hits_a) - static_cast<long long>(hits_b);

  const auto extreme = [&](std::size_t r) {
    Rng rng(seed, r);
    long long total = 0;
    for (std::size_t i = 0; i < n; ++i) total += diff[static_cast<std::size_t>(rng.below(n))];
    if (sidedness == Sidedness::one_sided) return total <= 0;
    return std::llabs(total - observed) >= std::llabs(observed);
  };

  jobs = std::max<std::size_t>(1, std::min(jobs, resamples));
  std::vector<std::size_t> counts(jobs, 0);
  if (jobs == 1) {
    for (std::size_t r = 0; r < resamples; ++r) counts[0] += extreme(r) ? 1 : 0;
  } else {
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t r = w; r < resamples; r += jobs) counts[w] += extreme(r) ? 1 : 0;
      });
    }
    for (auto& t : workers) t.join();
  }
  const auto count = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  report.p_value = static_cast<double>(1 + count) / static_cast<double>(resamples + 1);
  return report;
}

}  // namespace treeseq::eval
