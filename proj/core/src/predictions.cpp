#include "treeseq/task/predictions.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "treeseq/errors.hpp"

namespace treeseq::task {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view s, std::size_t line, const char* what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(std::string("expected ") + what + ", got '" + std::string(s) + "'", line);
  }
  return v;
}

}  // namespace

UnitKind unit_kind(std::string_view id) {
  const std::size_t colon = id.rfind(':');
  if (colon == std::string_view::npos) return UnitKind::root;
  const std::string_view tail = id.substr(colon + 1);
  if (tail.size() > 1 && tail[0] == 'w') return UnitKind::word;
  if (tail.size() > 1 && tail[0] == 'p') return UnitKind::phrase;
  return UnitKind::root;
}

std::string root_id(std::string_view example) { return std::string(example) + ":root"; }

std::string phrase_id(std::string_view example, std::size_t begin, std::size_t end) {
  return std::string(example) + ":p" + std::to_string(begin) + "-" + std::to_string(end);
}

std::string word_id(std::string_view example, std::size_t position) {
  return std::string(example) + ":w" + std::to_string(position);
}

void write_predictions(std::ostream& out, std::span<const Prediction> predictions) {
  char buf[32];
  for (const auto& p : predictions) {
    out << p.id << '\t' << p.gold << '\t' << p.predicted;
    for (const double s : p.scores) {
      std::snprintf(buf, sizeof buf, "%.17g", s);
      out << '\t' << buf;
    }
    out << '\n';
  }
}

std::vector<Prediction> read_predictions(std::istream& in) {
  std::vector<Prediction> out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() < 3) throw ParseError("expected id, gold and predicted columns", line_number);
    Prediction p;
    p.id = std::string(fields[0]);
    if (p.id.empty()) throw ParseError("empty example id", line_number);
    p.gold = parse_number<int>(fields[1], line_number, "an integer gold label");
    p.predicted = parse_number<int>(fields[2], line_number, "an integer prediction");
    for (std::size_t i = 3; i < fields.size(); ++i) {
      p.scores.push_back(parse_number<double>(fields[i], line_number, "a real score"));
    }
    if (!seen.insert(p.id).second) throw ParseError("duplicate example id '" + p.id + "'", line_number);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace treeseq::task
