#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "treeseq/autodiff/graph.hpp"
#include "treeseq/autodiff/grad_check.hpp"
#include "treeseq/cli/config.hpp"
#include "treeseq/corpus/datasets.hpp"

namespace treeseq::cli {

namespace fs = std::filesystem;

/// Names of the split files inside a prepared data directory.
inline constexpr const char* kSplitFiles[3] = {"train.txt", "dev.txt", "test.txt"};

struct PrepareReport {
  task::TaskKind task = task::TaskKind::treebank_sentiment;
  corpus::SplitCounts counts;
  /// Distinct phrases over all treebank sentences (treebank only).
  std::optional<std::size_t> phrases;
  std::size_t vocab_size = 0;
  std::optional<double> embedding_coverage;
};

/// Reads `config.input` (one file, or a directory holding train/dev/test
/// files), splits it, and writes the split files plus stats.json to `out`.
/// Nothing is written unless the whole input parses.
PrepareReport cmd_prepare(const ExperimentConfig& config, const fs::path& out);
std::string format_report(const PrepareReport& report);

struct TrainSummary {
  eval::Filter metric = eval::Filter::root;
  double test_metric = 0.0;
  double best_dev = 0.0;
  std::size_t best_epoch = 0;
};

/// Trains on the prepared data in `config.data`. Writes config.json, model.ckpt,
/// predictions.tsv, summary.txt and the timing log run_log.jsonl.
TrainSummary cmd_train(const ExperimentConfig& config, const fs::path& out, std::ostream& progress);
std::string summary_line(const TrainSummary& summary);

struct RepeatSummary {
  eval::Filter metric = eval::Filter::root;
  std::vector<double> test_metrics;
  eval::Summary test;
};

/// config.runs seeded runs. Writes config.json, runs.tsv, summary.txt,
/// predictions_run<i>.tsv and run_log.jsonl.
RepeatSummary cmd_repeat(const ExperimentConfig& config, const fs::path& out, std::size_t jobs, std::ostream& progress);
std::string summary_line(const RepeatSummary& summary);

struct CompareResult {
  std::string table;
  /// Bootstrap mode, one per filter.
  std::vector<eval::ComparisonReport> reports;
  /// Runs mode.
  std::optional<double> welch_t;
};

/// Bootstrap mode compares two prediction dumps (or train output directories);
/// runs mode compares two repeat output directories (or their runs.tsv files).
/// The second row shows its delta against the first.
CompareResult cmd_compare(const ExperimentConfig& config, const fs::path& a, const fs::path& b, std::size_t jobs,
                          const std::optional<fs::path>& out);

/// Largest K accepted by the gradient check.
inline constexpr std::size_t kGradCheckMaxDim = 10;
inline constexpr double kGradCheckTolerance = 1e-4;

/// Gradient check of config.model with the config.task head on one random
/// instance drawn from config.seed.
ad::GradCheckReport cmd_gradcheck(const ExperimentConfig& config, std::optional<ad::Op> fault = std::nullopt);
std::string format_report(const ad::GradCheckReport& report);

/// Runs the command line; returns the process exit code
/// (0 success, 1 invalid input or configuration, 2 runtime or numeric failure).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace treeseq::cli
