#include "treeseq/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "treeseq/corpus/embeddings.hpp"
#include "treeseq/corpus/phrases.hpp"
#include "treeseq/corpus/synthetic.hpp"
#include "treeseq/errors.hpp"
#include "treeseq/model/checkpoint.hpp"
#include "treeseq/task/examples.hpp"

namespace treeseq::cli {

namespace {

using nlohmann::json;
using task::Example;

std::string exact(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return in;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out.flush()) throw IoError("failed writing '" + path.string() + "'");
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::string with_newline(const json& j) { return j.dump(2) + "\n"; }

// ---- prepare ---------------------------------------------------------------

/// Raw treebank line kept verbatim next to its parse.
struct TreebankItem {
  std::string line;
  corpus::LabeledTree tree;
};

std::vector<TreebankItem> read_treebank_lines(std::istream& in, corpus::Vocab& vocab) {
  std::vector<TreebankItem> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line.back() == '\r') line.pop_back();
    auto tree = corpus::parse_tree(line, vocab, {}, number);
    out.push_back({std::move(line), std::move(tree)});
  }
  return out;
}

template <class T>
struct PreparedSplits {
  corpus::Splits<T> splits;
  std::string texts[3];
};

template <class T, class Read, class Write>
PreparedSplits<T> prepare_splits(const ExperimentConfig& c, Read read, Write write) {
  if (c.input.empty()) throw ValidationError("prepare needs an input path (--set input=PATH)");
  const fs::path input(c.input);
  const bool counts_given = c.train_count + c.dev_count + c.test_count > 0;
  PreparedSplits<T> out;
  if (fs::is_directory(input)) {
    if (counts_given) throw ValidationError("split counts apply to single-file input only; '" + c.input + "' is a directory");
    std::vector<T>* targets[3] = {&out.splits.train, &out.splits.dev, &out.splits.test};
    for (int i = 0; i < 3; ++i) {
      auto in = open_input(input / kSplitFiles[i]);
      *targets[i] = read(in);
    }
  } else {
    if (!fs::exists(input)) throw IoError("input '" + c.input + "' does not exist");
    auto in = open_input(input);
    auto items = read(in);
    if (items.empty()) throw ValidationError("input '" + c.input + "' holds no examples");
    const auto counts = counts_given ? corpus::SplitCounts{c.train_count, c.dev_count, c.test_count}
                                     : corpus::counts_from_ratios(items.size(), c.train_ratio, c.dev_ratio, c.test_ratio);
    out.splits = corpus::split_dataset(std::move(items), counts, c.split_seed);
  }
  if (out.splits.train.empty()) throw ValidationError("training split of '" + c.input + "' is empty");
  out.texts[0] = write(out.splits.train);
  out.texts[1] = write(out.splits.dev);
  out.texts[2] = write(out.splits.test);
  return out;
}

template <class T>
corpus::SplitCounts counts_of(const corpus::Splits<T>& s) {
  return {s.train.size(), s.dev.size(), s.test.size()};
}

template <class T, class Fn>
void for_each_item(const corpus::Splits<T>& s, Fn fn) {
  for (const auto* part : {&s.train, &s.dev, &s.test}) {
    for (const auto& item : *part) fn(item);
  }
}

// ---- data loading ----------------------------------------------------------

struct Dataset {
  corpus::Vocab vocab;
  corpus::Splits<Example> examples;
  task::TaskOptions options;
};

void check_prepared_task(const fs::path& dir, task::TaskKind expected) {
  const auto stats_path = dir / "stats.json";
  if (!fs::exists(stats_path)) return;
  auto in = open_input(stats_path);
  json stats;
  try {
    stats = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("'" + stats_path.string() + "' is not valid JSON: " + e.what());
  }
  if (stats.contains("task") && stats["task"] != task::task_name(expected)) {
    throw ValidationError("data in '" + dir.string() + "' was prepared for task " + stats["task"].dump() +
                          ", not " + std::string(task::task_name(expected)));
  }
}

Dataset load_dataset(const ExperimentConfig& c) {
  if (c.data.empty()) throw ValidationError("training needs a prepared data directory (--set data=DIR)");
  const fs::path dir(c.data);
  if (!fs::is_directory(dir)) throw IoError("data directory '" + c.data + "' does not exist");
  check_prepared_task(dir, c.task);

  Dataset d;
  d.options.kind = c.task;
  d.options.model = c.model_options();
  d.options.classes = c.classes ? c.classes : task::default_classes(c.task);
  d.options.negatives = c.negatives;
  std::ifstream files[3] = {open_input(dir / kSplitFiles[0]), open_input(dir / kSplitFiles[1]),
                            open_input(dir / kSplitFiles[2])};
  auto& ex = d.examples;

  switch (c.task) {
    case task::TaskKind::treebank_sentiment: {
      std::vector<corpus::LabeledTree> parts[3];
      for (int i = 0; i < 3; ++i) parts[i] = corpus::parse_sexpr_treebank(files[i], d.vocab);
      const bool phrases = c.phrase_training && !model::needs_tree(c.model);
      ex.train = phrases ? task::treebank_phrase_examples(parts[0], "train") : task::treebank_examples(parts[0], "train");
      ex.dev = task::treebank_examples(parts[1], "dev");
      ex.test = task::treebank_examples(parts[2], "test");
      break;
    }
    case task::TaskKind::pang_sentiment: {
      const int classes = static_cast<int>(d.options.classes);
      ex.train = task::sentence_examples(corpus::read_sentence_file(files[0], d.vocab, classes), "train");
      ex.dev = task::sentence_examples(corpus::read_sentence_file(files[1], d.vocab, classes), "dev");
      ex.test = task::sentence_examples(corpus::read_sentence_file(files[2], d.vocab, classes), "test");
      break;
    }
    case task::TaskKind::qa_match: {
      ex.train = task::qa_examples(corpus::read_qa_file(files[0], d.vocab), "train");
      ex.dev = task::qa_examples(corpus::read_qa_file(files[1], d.vocab), "dev");
      ex.test = task::qa_examples(corpus::read_qa_file(files[2], d.vocab), "test");
      std::size_t answers = 0;
      for_each_item(ex, [&](const Example& e) {
        answers = std::max(answers, static_cast<std::size_t>(e.label) + 1);
        for (const int a : e.candidates) answers = std::max(answers, static_cast<std::size_t>(a) + 1);
      });
      if (c.answers != 0 && c.answers < answers) {
        throw ValidationError("answers=" + std::to_string(c.answers) + " but the data uses answer ids up to " +
                              std::to_string(answers - 1));
      }
      d.options.answers = c.answers ? c.answers : answers;
      break;
    }
    case task::TaskKind::semeval_relation: {
      ex.train = task::relation_examples(corpus::read_relation_file(files[0], d.vocab), "train");
      ex.dev = task::relation_examples(corpus::read_relation_file(files[1], d.vocab), "dev");
      ex.test = task::relation_examples(corpus::read_relation_file(files[2], d.vocab), "test");
      break;
    }
  }
  if (ex.train.empty() || ex.dev.empty() || ex.test.empty()) {
    throw ValidationError("data directory '" + c.data + "' needs nonempty train, dev and test files");
  }
  d.options.model.punctuation = corpus::default_punctuation(d.vocab);
  // Reject model/data mismatches before any training starts.
  const task::TaskModel model(d.options);
  for_each_item(ex, [&](const Example& e) { model.check_example(e); });
  return d;
}

corpus::EmbeddingTable make_embeddings(const ExperimentConfig& c, const corpus::Vocab& vocab, std::uint64_t seed,
                                       std::ostream* log) {
  corpus::EmbeddingTable table;
  if (c.embeddings.empty()) {
    table = corpus::random_embeddings(vocab.size(), c.dim, seed);
  } else {
    auto loaded = corpus::load_embeddings(c.embeddings, vocab, c.dim, seed);
    if (log) {
      for (const auto& w : loaded.warnings) *log << "warning: " << w << "\n";
    }
    table = std::move(loaded.table);
  }
  table.trainable = c.resolved_embeddings_trainable();
  return table;
}

ad::ParamSet initial_params(const ExperimentConfig& c, const Dataset& d, const task::TaskModel& model, std::uint64_t seed,
                            std::ostream* log) {
  Rng rng(seed, 1);
  return model.init_params(make_embeddings(c, d.vocab, seed, log), rng);
}

json epoch_json(const train::EpochLog& log) {
  return {{"epoch", log.epoch}, {"train_loss", log.train_loss}, {"dev_metric", log.dev_metric}, {"seconds", log.seconds}};
}

void write_config(const ExperimentConfig& c, const fs::path& out) {
  write_file(out / "config.json", with_newline(c.to_json()));
}

std::string predictions_text(const std::vector<task::Prediction>& preds) {
  std::ostringstream s;
  task::write_predictions(s, preds);
  return s.str();
}

// ---- compare ---------------------------------------------------------------

std::string system_name(const fs::path& p) {
  const auto file = p.filename().string();
  if (fs::is_directory(p) || file.empty()) return p.lexically_normal().filename().string().empty()
                                                  ? p.parent_path().filename().string()
                                                  : p.lexically_normal().filename().string();
  if ((file == "predictions.tsv" || file == "runs.tsv") && p.has_parent_path()) return p.parent_path().filename().string();
  return p.stem().string();
}

std::vector<task::Prediction> read_dump(const fs::path& p) {
  const auto file = fs::is_directory(p) ? p / "predictions.tsv" : p;
  auto in = open_input(file);
  return task::read_predictions(in);
}

struct RunsFile {
  std::string label;
  std::vector<double> metrics;
};

RunsFile read_runs(const fs::path& p) {
  const auto file = fs::is_directory(p) ? p / "runs.tsv" : p;
  auto in = open_input(file);
  RunsFile out;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("'" + file.string() + "' is empty", 1);
  const auto tab = line.rfind('\t');
  if (line.rfind("run\t", 0) != 0 || tab == std::string::npos) {
    throw ParseError("'" + file.string() + "' lacks the runs.tsv header", 1);
  }
  out.label = line.substr(tab + 1);
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto last = line.rfind('\t');
    try {
      std::size_t used = 0;
      const std::string cell = line.substr(last + 1);
      out.metrics.push_back(std::stod(cell, &used));
      if (used != cell.size() || last == std::string::npos) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("bad metric in '" + file.string() + "'", number);
    }
  }
  return out;
}

// ---- gradcheck -------------------------------------------------------------

corpus::LabeledTree random_labeled_tree(std::span<const corpus::TokenId> tokens, Rng& rng) {
  corpus::LabeledTree::Builder b;
  const auto label = [&] { return static_cast<int>(rng.below(5)); };
  // Recursive random bracketing over [begin, end).
  const auto build = [&](auto&& self, std::size_t begin, std::size_t end) -> std::size_t {
    if (end - begin == 1) return b.leaf(tokens[begin], label());
    const std::size_t split = begin + 1 + static_cast<std::size_t>(rng.below(end - begin - 1));
    const auto left = self(self, begin, split);
    const auto right = self(self, split, end);
    return b.internal(left, right, label());
  };
  build(build, 0, tokens.size());
  return std::move(b).build();
}

}  // namespace

PrepareReport cmd_prepare(const ExperimentConfig& c, const fs::path& out) {
  PrepareReport report;
  report.task = c.task;
  corpus::Vocab vocab;
  std::string texts[3];

  switch (c.task) {
    case task::TaskKind::treebank_sentiment: {
      auto p = prepare_splits<TreebankItem>(
          c, [&](std::istream& in) { return read_treebank_lines(in, vocab); },
          [](const std::vector<TreebankItem>& items) {
            std::string s;
            for (const auto& i : items) s += i.line + "\n";
            return s;
          });
      std::vector<corpus::LabeledTree> trees;
      for_each_item(p.splits, [&](const TreebankItem& i) { trees.push_back(i.tree); });
      report.phrases = corpus::unique_phrases(trees).size();
      report.counts = counts_of(p.splits);
      std::move(std::begin(p.texts), std::end(p.texts), texts);
      break;
    }
    case task::TaskKind::pang_sentiment: {
      const int classes = static_cast<int>(c.classes ? c.classes : 2);
      auto p = prepare_splits<corpus::SentenceRecord>(
          c, [&](std::istream& in) { return corpus::read_sentence_file(in, vocab, classes); },
          [&](const std::vector<corpus::SentenceRecord>& items) {
            std::ostringstream s;
            corpus::write_sentence_file(s, items, vocab);
            return s.str();
          });
      report.counts = counts_of(p.splits);
      std::move(std::begin(p.texts), std::end(p.texts), texts);
      break;
    }
    case task::TaskKind::qa_match: {
      auto p = prepare_splits<corpus::QARecord>(
          c, [&](std::istream& in) { return corpus::read_qa_file(in, vocab); },
          [&](const std::vector<corpus::QARecord>& items) {
            std::ostringstream s;
            corpus::write_qa_file(s, items, vocab);
            return s.str();
          });
      report.counts = counts_of(p.splits);
      std::move(std::begin(p.texts), std::end(p.texts), texts);
      break;
    }
    case task::TaskKind::semeval_relation: {
      auto p = prepare_splits<corpus::RelationInstance>(
          c, [&](std::istream& in) { return corpus::read_relation_file(in, vocab); },
          [&](const std::vector<corpus::RelationInstance>& items) {
            std::ostringstream s;
            corpus::write_relation_file(s, items, vocab);
            return s.str();
          });
      report.counts = counts_of(p.splits);
      std::move(std::begin(p.texts), std::end(p.texts), texts);
      break;
    }
  }
  report.vocab_size = vocab.size();
  if (!c.embeddings.empty()) report.embedding_coverage = corpus::load_embeddings(c.embeddings, vocab, c.dim, c.seed).coverage;

  json stats = {{"task", task::task_name(c.task)},
                {"train", report.counts.train},
                {"dev", report.counts.dev},
                {"test", report.counts.test},
                {"sentences", report.counts.total()},
                {"vocab_size", report.vocab_size}};
  if (report.phrases) stats["phrases"] = *report.phrases;
  if (report.embedding_coverage) stats["embedding_coverage"] = *report.embedding_coverage;

  ensure_directory(out);
  for (int i = 0; i < 3; ++i) write_file(out / kSplitFiles[i], texts[i]);
  write_file(out / "stats.json", with_newline(stats));
  write_config(c, out);
  return report;
}

std::string format_report(const PrepareReport& r) {
  std::ostringstream s;
  s << "task " << task::task_name(r.task) << "\n";
  s << "sentences " << r.counts.total() << " (train " << r.counts.train << ", dev " << r.counts.dev << ", test "
    << r.counts.test << ")\n";
  if (r.phrases) s << "phrases " << *r.phrases << "\n";
  s << "vocab " << r.vocab_size << "\n";
  if (r.embedding_coverage) s << "embedding_coverage " << exact(*r.embedding_coverage) << "\n";
  return s.str();
}

TrainSummary cmd_train(const ExperimentConfig& c, const fs::path& out, std::ostream& progress) {
  const auto config = c.train_config();
  config.validate();
  const Dataset d = load_dataset(c);
  const task::TaskModel model(d.options);
  auto initial = initial_params(c, d, model, c.seed, &progress);

  ensure_directory(out);
  write_config(c, out);
  std::ofstream log(out / "run_log.jsonl");
  if (!log) throw IoError("cannot write '" + (out / "run_log.jsonl").string() + "'");
  const auto record = train::train(config, model, d.examples, std::move(initial), [&](const train::EpochLog& e) {
    log << epoch_json(e).dump() << "\n" << std::flush;
    progress << "epoch " << e.epoch << " loss " << exact(e.train_loss) << " dev " << exact(e.dev_metric) << "\n";
  });

  TrainSummary summary{c.metric, record.test_metric, record.dev_metrics[record.best_epoch - 1], record.best_epoch};
  model::save_checkpoint(out / "model.ckpt", record.params);
  write_file(out / "predictions.tsv", predictions_text(record.test_predictions));
  std::ostringstream s;
  s << "task " << task::task_name(c.task) << "\nmodel " << model::model_name(c.model) << "\nmetric "
    << eval::filter_name(c.metric) << "\nbest_epoch " << summary.best_epoch << "\nbest_dev " << exact(summary.best_dev)
    << "\ntest " << exact(summary.test_metric) << "\n";
  write_file(out / "summary.txt", s.str());
  return summary;
}

std::string summary_line(const TrainSummary& s) {
  return "test " + std::string(eval::filter_name(s.metric)) + " accuracy " + exact(s.test_metric) + " (best epoch " +
         std::to_string(s.best_epoch) + ", dev " + exact(s.best_dev) + ")";
}

RepeatSummary cmd_repeat(const ExperimentConfig& c, const fs::path& out, std::size_t jobs, std::ostream& progress) {
  const auto config = c.train_config();
  config.validate();
  if (c.runs == 0) throw ValidationError("runs must be positive");
  const Dataset d = load_dataset(c);
  const task::TaskModel model(d.options);

  ensure_directory(out);
  write_config(c, out);
  std::ofstream log(out / "run_log.jsonl");
  if (!log) throw IoError("cannot write '" + (out / "run_log.jsonl").string() + "'");
  const train::ParamFactory factory = [&](std::uint64_t seed) { return initial_params(c, d, model, seed, nullptr); };
  const auto result = train::repeat_runs(config, model, d.examples, factory, c.runs, jobs,
                                         [&](std::size_t run, const train::EpochLog& e) {
                                           auto j = epoch_json(e);
                                           j["run"] = run;
                                           log << j.dump() << "\n" << std::flush;
                                           progress << "run " << run << " epoch " << e.epoch << " dev "
                                                    << exact(e.dev_metric) << "\n";
                                         });

  RepeatSummary summary{c.metric, {}, result.test};
  std::string runs = "run\tseed\tbest_epoch\tbest_dev\ttest:" + std::string(eval::filter_name(c.metric)) + "\n";
  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    const auto& r = result.runs[i];
    summary.test_metrics.push_back(r.test_metric);
    runs += std::to_string(i) + "\t" + std::to_string(r.seed) + "\t" + std::to_string(r.best_epoch) + "\t" +
            exact(r.dev_metrics[r.best_epoch - 1]) + "\t" + exact(r.test_metric) + "\n";
    write_file(out / ("predictions_run" + std::to_string(i) + ".tsv"), predictions_text(r.test_predictions));
  }
  write_file(out / "runs.tsv", runs);
  std::ostringstream s;
  s << "task " << task::task_name(c.task) << "\nmodel " << model::model_name(c.model) << "\nmetric "
    << eval::filter_name(c.metric) << "\nruns " << result.test.count << "\nmean " << exact(result.test.mean)
    << "\nstd " << exact(result.test.stddev) << "\ncell " << eval::format_mean_std(result.test) << "\n";
  write_file(out / "summary.txt", s.str());
  return summary;
}

std::string summary_line(const RepeatSummary& s) {
  return "test " + std::string(eval::filter_name(s.metric)) + " accuracy over " + std::to_string(s.test.count) +
         " runs: " + eval::format_mean_std(s.test) + " (mean " + exact(s.test.mean) + ", std " + exact(s.test.stddev) +
         ")";
}

CompareResult cmd_compare(const ExperimentConfig& c, const fs::path& a, const fs::path& b, std::size_t jobs,
                          const std::optional<fs::path>& out) {
  if (!c.names.empty() && c.names.size() != 2) throw ValidationError("names needs exactly two entries");
  const std::string name_a = c.names.empty() ? system_name(a) : c.names[0];
  const std::string name_b = c.names.empty() ? system_name(b) : c.names[1];
  CompareResult result;
  eval::Table table;
  json details = json::object();

  if (c.mode == "bootstrap") {
    const auto pa = read_dump(a);
    const auto pb = read_dump(b);
    eval::TableRow row_a{name_a, {}, std::nullopt};
    eval::TableRow row_b{name_b, {}, std::nullopt};
    auto comparisons = json::array();
    for (const auto filter : c.filters) {
      // One-sided tests run in the direction of the observed difference.
      auto r = eval::bootstrap_test(pa, pb, filter, c.resamples, c.seed, c.sidedness, jobs);
      if (c.sidedness == eval::Sidedness::one_sided && r.delta < 0) {
        const auto flipped = eval::bootstrap_test(pb, pa, filter, c.resamples, c.seed, c.sidedness, jobs);
        r.p_value = flipped.p_value;
      }
      table.metrics.emplace_back(eval::filter_name(filter));
      row_a.cells.push_back(eval::format_metric(r.accuracy_a));
      row_b.cells.push_back(eval::format_with_delta(r.accuracy_b, r.accuracy_b - r.accuracy_a));
      comparisons.push_back({{"filter", eval::filter_name(filter)},
                             {"accuracy_a", r.accuracy_a},
                             {"accuracy_b", r.accuracy_b},
                             {"delta", r.delta},
                             {"p", r.p_value},
                             {"examples", r.examples},
                             {"resamples", r.resamples},
                             {"seed", r.seed}});
      result.reports.push_back(r);
    }
    row_b.p_value = result.reports.front().p_value;
    table.rows = {row_a, row_b};
    details = {{"mode", "bootstrap"},
               {"a", name_a},
               {"b", name_b},
               {"sidedness", c.sidedness == eval::Sidedness::one_sided ? "one-sided" : "two-sided"},
               {"comparisons", comparisons}};
  } else {
    const auto ra = read_runs(a);
    const auto rb = read_runs(b);
    if (ra.metrics.size() < 2 || rb.metrics.size() < 2) {
      throw ValidationError("runs mode needs at least 2 runs per system (got " + std::to_string(ra.metrics.size()) +
                            " and " + std::to_string(rb.metrics.size()) + ")");
    }
    const auto sa = eval::aggregate(ra.metrics);
    const auto sb = eval::aggregate(rb.metrics);
    result.welch_t = eval::welch_t(ra.metrics, rb.metrics);
    table.metrics = {ra.label};
    table.rows = {{name_a, {eval::format_mean_std(sa)}, std::nullopt}, {name_b, {eval::format_mean_std(sb)}, std::nullopt}};
    details = {{"mode", "runs"},     {"a", name_a},         {"b", name_b},        {"mean_a", sa.mean},
               {"std_a", sa.stddev}, {"runs_a", sa.count},  {"mean_b", sb.mean},  {"std_b", sb.stddev},
               {"runs_b", sb.count}, {"welch_t", *result.welch_t}};
  }

  result.table = eval::emit_table(table, c.format);
  if (out) {
    ensure_directory(*out);
    write_file(*out / (c.format == eval::TableFormat::tsv ? "table.tsv" : "table.json"), result.table);
    write_file(*out / "compare.json", with_newline(details));
  }
  return result;
}

ad::GradCheckReport cmd_gradcheck(const ExperimentConfig& c, std::optional<ad::Op> fault) {
  if (c.dim == 0) throw ValidationError("dim must be positive");
  if (c.dim > kGradCheckMaxDim) {
    throw ValidationError("dim=" + std::to_string(c.dim) + " is too large for the gradient check (limit " +
                          std::to_string(kGradCheckMaxDim) +
                          "): finite differences cost two loss evaluations per weight; rerun with --set dim=5");
  }
  Rng rng(c.seed, 3);
  corpus::Vocab vocab;
  for (int i = 0; i < 10; ++i) vocab.intern("w" + std::to_string(i));
  vocab.intern(",");
  vocab.intern(".");
  std::vector<corpus::TokenId> tokens(2 + rng.below(6));
  for (auto& t : tokens) t = static_cast<corpus::TokenId>(1 + rng.below(vocab.size() - 1));

  task::TaskOptions options;
  options.kind = c.task;
  options.model = c.model_options();
  options.model.punctuation = corpus::default_punctuation(vocab);
  options.classes = task::default_classes(c.task);
  Example ex;
  ex.id = "check";
  ex.tokens = tokens;
  ex.tree = random_labeled_tree(tokens, rng);
  switch (c.task) {
    case task::TaskKind::treebank_sentiment: ex.label = *ex.tree->node(ex.tree->root()).label; break;
    case task::TaskKind::pang_sentiment: ex.label = static_cast<int>(rng.below(2)); break;
    case task::TaskKind::semeval_relation: ex.label = static_cast<int>(rng.below(19)); break;
    case task::TaskKind::qa_match:
      options.answers = 6;
      options.negatives = 3;
      ex.candidates = {0, 1, 2, 3, 4, 5};
      rng.shuffle(ex.candidates);
      ex.candidates.resize(4);
      ex.label = ex.candidates[0];
      break;
  }
  const task::TaskModel model(options);
  auto params = model.init_params(corpus::random_embeddings(vocab.size(), c.dim, c.seed, 0.5), rng);
  // Training init leaves many gradients near 1e-9, where the error floor turns loss roundoff into false failures.
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (auto& x : params.at(p).value.data()) x = rng.uniform() * 2.0 - 1.0;
  }
  const std::uint64_t seed = c.seed;
  ad::GraphOptions graph_options;
  graph_options.flip_backward_sign = fault;
  return ad::grad_check(
      [&](ad::Graph& g, const ad::ParamSet& p) {
        Rng sampler(seed, 4);
        return model.loss(g, p, ex, sampler);
      },
      params, 1e-4, graph_options);
}

std::string format_report(const ad::GradCheckReport& report) {
  std::ostringstream s;
  std::string failed;
  for (const auto& t : report.tensors) {
    const bool ok = t.max_rel_error < kGradCheckTolerance;
    char line[160];
    std::snprintf(line, sizeof line, "%-28s %.3e  %s\n", t.name.c_str(), t.max_rel_error, ok ? "PASS" : "FAIL");
    s << line;
    if (!ok) failed += (failed.empty() ? "" : ", ") + t.name;
  }
  if (failed.empty()) {
    s << "PASS max relative error " << exact(report.max_rel_error) << "\n";
  } else {
    s << "FAIL in " << failed << "\n";
  }
  return s.str();
}

}  // namespace treeseq::cli
