#include "treeseq/corpus/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>

namespace treeseq::corpus {

namespace {

std::vector<std::string_view> split_on(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<TokenId> intern_tokens(std::string_view text, Vocab& vocab, std::size_t line) {
  std::vector<TokenId> out;
  for (auto tok : split_on(text, ' ')) {
    if (!tok.empty()) out.push_back(vocab.intern(tok));
  }
  if (out.empty()) throw ParseError("empty token sequence", line);
  return out;
}

int parse_int(std::string_view s, std::size_t line, const char* what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(std::string("expected integer ") + what + ", got '" + std::string(s) + "'", line);
  }
  return v;
}

LabeledTree parse_aligned_tree(std::string_view text, const std::vector<TokenId>& tokens, Vocab& vocab,
                               std::size_t line) {
  TreeParseOptions options;
  options.sentiment_labels = false;
  LabeledTree tree = parse_tree(text, vocab, options, line);
  if (tree.tokens() != tokens) throw ParseError("tree leaves do not match the token sequence", line);
  return tree;
}

void write_tokens(std::ostream& out, std::span<const TokenId> tokens, const Vocab& vocab) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out << ' ';
    out << vocab.token(tokens[i]);
  }
}

template <class Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    fn(std::string_view(line), line_number);
  }
}

}  // namespace

std::vector<SentenceRecord> read_sentence_file(std::istream& in, Vocab& vocab, int classes) {
  std::vector<SentenceRecord> out;
  for_each_line(in, [&](std::string_view line, std::size_t n) {
    const auto fields = split_on(line, '\t');
    if (fields.size() != 2 && fields.size() != 3) throw ParseError("expected label<TAB>tokens[<TAB>tree]", n);
    SentenceRecord r;
    r.label = parse_int(fields[0], n, "label");
    if (r.label < 0 || r.label >= classes) {
      throw ParseError("label " + std::to_string(r.label) + " outside [0, " + std::to_string(classes - 1) + "]", n);
    }
    r.tokens = intern_tokens(fields[1], vocab, n);
    if (fields.size() == 3) r.tree = parse_aligned_tree(fields[2], r.tokens, vocab, n);
    out.push_back(std::move(r));
  });
  return out;
}

void write_sentence_file(std::ostream& out, std::span<const SentenceRecord> items, const Vocab& vocab) {
  for (const auto& r : items) {
    out << r.label << '\t';
    write_tokens(out, r.tokens, vocab);
    if (r.tree) out << '\t' << to_sexpr(*r.tree, vocab);
    out << '\n';
  }
}

std::vector<QARecord> read_qa_file(std::istream& in, Vocab& vocab) {
  std::vector<QARecord> out;
  for_each_line(in, [&](std::string_view line, std::size_t n) {
    const auto fields = split_on(line, '\t');
    if (fields.size() != 3 && fields.size() != 4) {
      throw ParseError("expected tokens<TAB>answer<TAB>pool[<TAB>tree]", n);
    }
    QARecord r;
    r.tokens = intern_tokens(fields[0], vocab, n);
    r.answer = parse_int(fields[1], n, "answer id");
    for (auto id : split_on(fields[2], ',')) r.pool.push_back(parse_int(id, n, "candidate id"));
    if (r.answer < 0 || std::any_of(r.pool.begin(), r.pool.end(), [](int a) { return a < 0; })) {
      throw ParseError("answer ids must be nonnegative", n);
    }
    if (r.pool.size() < 2) throw ParseError("candidate pool needs at least 2 answers", n);
    if (std::find(r.pool.begin(), r.pool.end(), r.answer) == r.pool.end()) {
      throw ParseError("gold answer " + std::to_string(r.answer) + " not in candidate pool", n);
    }
    if (fields.size() == 4) r.tree = parse_aligned_tree(fields[3], r.tokens, vocab, n);
    out.push_back(std::move(r));
  });
  return out;
}

void write_qa_file(std::ostream& out, std::span<const QARecord> items, const Vocab& vocab) {
  for (const auto& r : items) {
    write_tokens(out, r.tokens, vocab);
    out << '\t' << r.answer << '\t';
    for (std::size_t i = 0; i < r.pool.size(); ++i) out << (i > 0 ? "," : "") << r.pool[i];
    if (r.tree) out << '\t' << to_sexpr(*r.tree, vocab);
    out << '\n';
  }
}

SplitCounts counts_from_ratios(std::size_t size, double train, double dev, double test) {
  if (train < 0.0 || dev < 0.0 || test < 0.0 || std::abs(train + dev + test - 1.0) > 1e-9) {
    throw ValidationError("split ratios must be nonnegative and sum to 1");
  }
  SplitCounts c;
  c.train = static_cast<std::size_t>(std::floor(train * static_cast<double>(size)));
  c.dev = static_cast<std::size_t>(std::floor(dev * static_cast<double>(size)));
  c.test = size - c.train - c.dev;
  return c;
}

}  // namespace treeseq::corpus
