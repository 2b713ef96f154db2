#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treeseq/task/predictions.hpp"

namespace treeseq::eval {

using task::Prediction;

/// Which predictions count and how they are scored.
enum class Filter {
  all,
  /// Whole examples / sentence roots only.
  root,
  /// Multi-word nodes (roots and inner phrases), single words excluded.
  phrase,
  /// Binary decoding of 5-class scores; gold-neutral items excluded.
  all_coarse,
  root_coarse,
};

std::string_view filter_name(Filter filter);
/// "all", "root", "phrase", "all-coarse" or "root-coarse".
Filter parse_filter(std::string_view name);

/// Whether the prediction takes part under `filter`.
bool selected(const Prediction& p, Filter filter);
/// Correctness under `filter`; only meaningful for selected predictions.
bool correct(const Prediction& p, Filter filter);

/// Correct / total over the selected predictions. Throws ValidationError when none is selected.
double accuracy(std::span<const Prediction> predictions, Filter filter);

struct Summary {
  double mean = 0.0;
  /// Sample (n − 1) standard deviation; 0 when n = 1.
  double stddev = 0.0;
  std::size_t count = 0;
};

/// Throws ValidationError for an empty input.
Summary aggregate(std::span<const double> values);

/// Welch two-sample t statistic (a − b); reported descriptively only.
/// Throws ValidationError unless both samples have at least 2 values.
double welch_t(std::span<const double> a, std::span<const double> b);

enum class Sidedness { one_sided, two_sided };

struct ComparisonReport {
  double accuracy_a = 0.0;
  double accuracy_b = 0.0;
  /// accuracy_a − accuracy_b
  double delta = 0.0;
  double p_value = 1.0;
  std::size_t resamples = 0;
  std::size_t examples = 0;
  std::uint64_t seed = 0;
  Sidedness sidedness = Sidedness::one_sided;
};

inline constexpr std::size_t kDefaultResamples = 10000;
inline constexpr std::size_t kMinResamples = 1000;

/// Paired bootstrap over the shared example ids. One-sided tests "a better
/// than b": p = (1 + #{resamples with acc(a*) ≤ acc(b*)}) / (B + 1). Two-sided
/// counts resamples whose centered delta is at least as extreme as the observed one.
/// Resample r draws from Rng(seed, r), so results do not depend on `jobs`.
/// Throws ValidationError when the id sets differ or B < 1000.
ComparisonReport bootstrap_test(std::span<const Prediction> a, std::span<const Prediction> b, Filter filter,
                                std::size_t resamples = kDefaultResamples, std::uint64_t seed = 0,
                                Sidedness sidedness = Sidedness::one_sided, std::size_t jobs = 1);

}  // namespace treeseq::eval
