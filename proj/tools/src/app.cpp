#include <CLI11.hpp>
#include <algorithm>
#include <iostream>

#include "treeseq/cli/commands.hpp"
#include "treeseq/errors.hpp"

namespace treeseq::cli {

namespace {

struct CommonOptions {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
};

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--set", o.sets, "Override a config key (key=value, repeatable)")->allow_extra_args(false);
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--seed", o.seed, "Random seed (same as --set seed=N)");
  sub->add_option("--jobs", o.jobs, "Worker threads for repeat runs and bootstrap resampling")->check(CLI::PositiveNumber);
}

ExperimentConfig resolve(const CommonOptions& o) {
  auto sets = o.sets;
  if (o.seed) sets.push_back("seed=" + std::to_string(*o.seed));
  return load_config(o.config.empty() ? std::nullopt : std::optional<fs::path>(o.config), sets);
}

fs::path required_out(const CommonOptions& o, const char* command) {
  if (o.out.empty()) throw ValidationError(std::string(command) + " needs an output directory (--out DIR)");
  return o.out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tree and sequence composition models: data preparation, training and significance testing", "treeseq"};
  app.require_subcommand(1, 1);
  CommonOptions o;
  auto* prepare = app.add_subcommand("prepare", "Split a raw corpus and report its statistics");
  auto* train = app.add_subcommand("train", "Train one model and dump test predictions");
  auto* repeat = app.add_subcommand("repeat", "Train several seeded runs and aggregate the test metric");
  auto* compare = app.add_subcommand("compare", "Compare two systems (bootstrap over dumps, or repeated runs)");
  auto* gradcheck = app.add_subcommand("gradcheck", "Check a model's gradients against finite differences");
  for (auto* sub : {prepare, train, repeat, compare, gradcheck}) add_common(sub, o);
  std::string path_a;
  std::string path_b;
  compare->add_option("a", path_a, "First system: prediction dump, or train/repeat output directory")->required();
  compare->add_option("b", path_b, "Second system")->required();
  std::string fault;
  gradcheck->add_option("--inject-fault", fault, "Flip the sign of one op's backward rule (harness self-test)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    const ExperimentConfig config = resolve(o);
    if (prepare->parsed()) {
      out << format_report(cmd_prepare(config, required_out(o, "prepare")));
    } else if (train->parsed()) {
      out << summary_line(cmd_train(config, required_out(o, "train"), err)) << "\n";
    } else if (repeat->parsed()) {
      out << summary_line(cmd_repeat(config, required_out(o, "repeat"), o.jobs, err)) << "\n";
    } else if (compare->parsed()) {
      const auto result = cmd_compare(config, path_a, path_b, o.jobs,
                                      o.out.empty() ? std::nullopt : std::optional<fs::path>(o.out));
      out << result.table;
      if (result.welch_t) out << "welch_t " << *result.welch_t << "\n";
    } else if (gradcheck->parsed()) {
      const auto report = cmd_gradcheck(config, fault.empty() ? std::nullopt : std::optional(ad::parse_op(fault)));
      out << format_report(report);
      if (!report.passed(kGradCheckTolerance)) return 2;
    }
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const StructuralError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace treeseq::cli
