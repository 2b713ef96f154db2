#include "treeseq/cli/config.hpp"

#include <fstream>

#include "treeseq/errors.hpp"

namespace treeseq::cli {

namespace {

using nlohmann::json;

std::string_view sidedness_name(eval::Sidedness s) {
  return s == eval::Sidedness::one_sided ? "one-sided" : "two-sided";
}

eval::Sidedness parse_sidedness(std::string_view name) {
  if (name == "one-sided") return eval::Sidedness::one_sided;
  if (name == "two-sided") return eval::Sidedness::two_sided;
  throw ValidationError("unknown sidedness '" + std::string(name) + "' (expected one-sided or two-sided)");
}

std::string_view format_name(eval::TableFormat f) { return f == eval::TableFormat::tsv ? "tsv" : "json"; }

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string::npos ? text.size() : comma;
    if (end > start) out.push_back(text.substr(start, end - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("config key '") + key + "' has the wrong type");
  }
}

std::size_t get_count(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ValidationError(std::string("config key '") + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

// Converts an override string according to the type of the default value.
json convert(const json& like, std::string_view key, const std::string& text) {
  const auto bad = [&] { return ValidationError("cannot read '" + text + "' as a value for '" + std::string(key) + "'"); };
  if (like.is_boolean() || like.is_null()) {
    if (text == "true") return true;
    if (text == "false") return false;
    if (like.is_null() && (text == "null" || text.empty())) return nullptr;
    throw bad();
  }
  if (like.is_number_integer()) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(text, &used);
    } catch (const std::exception&) {
      throw bad();
    }
    if (used != text.size()) throw bad();
    return v;
  }
  if (like.is_number()) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      throw bad();
    }
    if (used != text.size()) throw bad();
    return v;
  }
  return text;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  const json defaults = ExperimentConfig{}.to_json();
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw ValidationError("unknown config key '" + key + "'");
  }
  json merged = defaults;
  merged.update(j);

  ExperimentConfig c;
  c.task = task::parse_task_kind(get<std::string>(merged, "task"));
  c.model = model::parse_model_kind(get<std::string>(merged, "model"));
  c.dim = get_count(merged, "dim");
  c.learning_rate = get<double>(merged, "learning_rate");
  c.l2 = get<double>(merged, "l2");
  c.batch_size = get_count(merged, "batch_size");
  c.epochs = get_count(merged, "epochs");
  c.seed = get_count(merged, "seed");
  c.epsilon = get<double>(merged, "epsilon");
  if (!merged.at("embeddings_trainable").is_null()) c.embeddings_trainable = get<bool>(merged, "embeddings_trainable");
  c.metric = eval::parse_filter(get<std::string>(merged, "metric"));
  c.combine = model::parse_combine(get<std::string>(merged, "combine"));
  c.layers = get_count(merged, "layers");
  c.negatives = get_count(merged, "negatives");
  c.classes = get_count(merged, "classes");
  c.answers = get_count(merged, "answers");
  c.phrase_training = get<bool>(merged, "phrase_training");
  c.input = get<std::string>(merged, "input");
  c.data = get<std::string>(merged, "data");
  c.embeddings = get<std::string>(merged, "embeddings");
  c.train_count = get_count(merged, "train_count");
  c.dev_count = get_count(merged, "dev_count");
  c.test_count = get_count(merged, "test_count");
  c.train_ratio = get<double>(merged, "train_ratio");
  c.dev_ratio = get<double>(merged, "dev_ratio");
  c.test_ratio = get<double>(merged, "test_ratio");
  c.split_seed = get_count(merged, "split_seed");
  c.runs = get_count(merged, "runs");
  c.mode = get<std::string>(merged, "mode");
  if (c.mode != "bootstrap" && c.mode != "runs") {
    throw ValidationError("unknown compare mode '" + c.mode + "' (expected bootstrap or runs)");
  }
  c.filters.clear();
  for (const auto& f : split_list(get<std::string>(merged, "filters"))) c.filters.push_back(eval::parse_filter(f));
  if (c.filters.empty()) throw ValidationError("config key 'filters' needs at least one filter");
  c.resamples = get_count(merged, "resamples");
  c.sidedness = parse_sidedness(get<std::string>(merged, "sidedness"));
  c.format = eval::parse_table_format(get<std::string>(merged, "format"));
  c.names = split_list(get<std::string>(merged, "names"));
  if (c.layers == 0) throw ValidationError("layers must be positive");
  return c;
}

json ExperimentConfig::to_json() const {
  json j = json::object();
  j["task"] = task::task_name(task);
  j["model"] = model::model_name(model);
  j["dim"] = dim;
  j["learning_rate"] = learning_rate;
  j["l2"] = l2;
  j["batch_size"] = batch_size;
  j["epochs"] = epochs;
  j["seed"] = seed;
  j["epsilon"] = epsilon;
  j["embeddings_trainable"] = embeddings_trainable ? json(*embeddings_trainable) : json(nullptr);
  j["metric"] = eval::filter_name(metric);
  j["combine"] = model::combine_name(combine);
  j["layers"] = layers;
  j["negatives"] = negatives;
  j["classes"] = classes;
  j["answers"] = answers;
  j["phrase_training"] = phrase_training;
  j["input"] = input;
  j["data"] = data;
  j["embeddings"] = embeddings;
  j["train_count"] = train_count;
  j["dev_count"] = dev_count;
  j["test_count"] = test_count;
  j["train_ratio"] = train_ratio;
  j["dev_ratio"] = dev_ratio;
  j["test_ratio"] = test_ratio;
  j["split_seed"] = split_seed;
  j["runs"] = runs;
  j["mode"] = mode;
  std::vector<std::string> filter_names;
  for (const auto f : filters) filter_names.emplace_back(eval::filter_name(f));
  j["filters"] = join_list(filter_names);
  j["resamples"] = resamples;
  j["sidedness"] = sidedness_name(sidedness);
  j["format"] = format_name(format);
  j["names"] = join_list(names);
  return j;
}

bool ExperimentConfig::resolved_embeddings_trainable() const {
  return embeddings_trainable.value_or(task != task::TaskKind::pang_sentiment);
}

train::TrainConfig ExperimentConfig::train_config() const {
  train::TrainConfig t;
  t.learning_rate = learning_rate;
  t.l2 = l2;
  t.batch_size = batch_size;
  t.epochs = epochs;
  t.seed = seed;
  t.embeddings_trainable = resolved_embeddings_trainable();
  t.task = task;
  t.model = model;
  t.dim = dim;
  t.epsilon = epsilon;
  t.metric = metric;
  return t;
}

model::ModelOptions ExperimentConfig::model_options() const {
  model::ModelOptions o;
  o.kind = model;
  o.dim = dim;
  o.combine = combine;
  o.layers = layers;
  return o;
}

void apply_override(json& j, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ValidationError("override '" + std::string(assignment) + "' is not of the form key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string value(assignment.substr(eq + 1));
  const json defaults = ExperimentConfig{}.to_json();
  if (!defaults.contains(key)) throw ValidationError("unknown config key '" + key + "'");
  j[key] = convert(defaults.at(key), key, value);
}

ExperimentConfig load_config(const std::optional<std::filesystem::path>& file, const std::vector<std::string>& overrides) {
  json j = json::object();
  if (file) {
    std::ifstream in(*file);
    if (!in) throw IoError("cannot open config file '" + file->string() + "'");
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ValidationError("config file '" + file->string() + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ValidationError("config file '" + file->string() + "' must hold a JSON object");
  }
  for (const auto& o : overrides) apply_override(j, o);
  return ExperimentConfig::from_json(j);
}

}  // namespace treeseq::cli
