#include "treeseq/corpus/synthetic.hpp"

#include <algorithm>
#include <array>
#include <string_view>

namespace treeseq::corpus {

namespace {

constexpr std::array<std::string_view, 6> kPositive{"good", "great", "fun", "charming", "lovely", "moving"};
constexpr std::array<std::string_view, 6> kNegative{"bad", "dull", "awful", "boring", "weak", "messy"};
constexpr std::array<std::string_view, 12> kNeutral{"the", "film", "plot", "movie", "story", "actors",
                                                    "was", "is", "a", "it", "and", "cast"};

struct Fragment {
  std::string text;
  int score = 0;
  bool negator = false;
};

int label_of(int score) { return std::clamp(score, -2, 2) + 2; }

Fragment word(std::string_view w, int score) {
  Fragment f;
  f.score = score;
  f.negator = w == "not";
  f.text = "(" + std::to_string(label_of(score)) + " " + std::string(w) + ")";
  return f;
}

Fragment join(const Fragment& a, const Fragment& b) {
  Fragment f;
  f.score = a.negator ? -b.score : a.score + b.score;
  f.text = "(" + std::to_string(label_of(f.score)) + " " + a.text + " " + b.text + ")";
  return f;
}

Fragment bracket(std::vector<Fragment> parts, Rng& rng) {
  while (parts.size() > 1) {
    const auto i = static_cast<std::size_t>(rng.below(parts.size() - 1));
    parts[i] = join(parts[i], parts[i + 1]);
    parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(i) + 1);
  }
  return parts.front();
}

Fragment clause(Rng& rng) {
  std::vector<Fragment> parts;
  const std::size_t length = 2 + rng.below(4);
  for (std::size_t i = 0; i < length; ++i) {
    const auto kind = rng.below(10);
    if (kind < 5) {
      parts.push_back(word(kNeutral[rng.below(kNeutral.size())], 0));
    } else {
      const bool positive = rng.below(2) == 0;
      Fragment w = positive ? word(kPositive[rng.below(kPositive.size())], 1)
                            : word(kNegative[rng.below(kNegative.size())], -1);
      if (rng.below(4) == 0) w = join(word("not", 0), w);
      parts.push_back(std::move(w));
    }
  }
  return bracket(std::move(parts), rng);
}

std::string filler(std::size_t i) { return "w" + std::to_string(i); }

}  // namespace

LabeledTree random_binary_tree(std::span<const TokenId> tokens, Rng& rng) {
  if (tokens.empty()) throw ValidationError("cannot build a tree over no tokens");
  LabeledTree::Builder b;
  std::vector<std::size_t> parts;
  for (const TokenId t : tokens) parts.push_back(b.leaf(t));
  while (parts.size() > 1) {
    const auto i = static_cast<std::size_t>(rng.below(parts.size() - 1));
    parts[i] = b.internal(parts[i], parts[i + 1]);
    parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(i) + 1);
  }
  return std::move(b).build();
}

std::vector<std::string> synthetic_treebank_lines(std::size_t sentences, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::string> lines;
  lines.reserve(sentences);
  for (std::size_t s = 0; s < sentences; ++s) {
    const std::size_t clauses = 1 + rng.below(3);
    Fragment sentence = clause(rng);
    for (std::size_t c = 1; c < clauses; ++c) {
      sentence = join(join(sentence, word(",", 0)), clause(rng));
    }
    if (rng.below(2) == 0) sentence = join(sentence, word(".", 0));
    lines.push_back(std::move(sentence.text));
  }
  return lines;
}

std::vector<SentenceRecord> separable_sentences(std::size_t count, int classes, Vocab& vocab, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SentenceRecord> out;
  for (std::size_t i = 0; i < count; ++i) {
    SentenceRecord r;
    r.label = static_cast<int>(i % static_cast<std::size_t>(classes));
    const std::size_t length = 3 + rng.below(5);
    const std::size_t marker = rng.below(length);
    for (std::size_t k = 0; k < length; ++k) {
      if (k == marker) {
        r.tokens.push_back(vocab.intern("cls" + std::to_string(r.label)));
      } else if (rng.below(6) == 0) {
        r.tokens.push_back(vocab.intern(","));
      } else {
        r.tokens.push_back(vocab.intern(filler(rng.below(12))));
      }
    }
    r.tree = random_binary_tree(r.tokens, rng);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<QARecord> synthetic_qa(std::size_t count, std::size_t answers, std::size_t pool, Vocab& vocab,
                                   std::uint64_t seed) {
  Rng rng(seed);
  pool = std::min(pool, answers);
  std::vector<QARecord> out;
  for (std::size_t i = 0; i < count; ++i) {
    QARecord r;
    r.answer = static_cast<int>(rng.below(answers));
    const std::size_t length = 3 + rng.below(5);
    const std::size_t cue = rng.below(length);
    for (std::size_t k = 0; k < length; ++k) {
      r.tokens.push_back(vocab.intern(k == cue ? "cue" + std::to_string(r.answer) : filler(rng.below(12))));
    }
    std::vector<int> others;
    for (std::size_t a = 0; a < answers; ++a) {
      if (static_cast<int>(a) != r.answer) others.push_back(static_cast<int>(a));
    }
    rng.shuffle(others);
    r.pool.push_back(r.answer);
    r.pool.insert(r.pool.end(), others.begin(), others.begin() + static_cast<std::ptrdiff_t>(pool - 1));
    std::sort(r.pool.begin(), r.pool.end());
    r.tree = random_binary_tree(r.tokens, rng);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::size_t> random_heads(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i + 1;
  rng.shuffle(order);
  std::vector<std::size_t> heads(n, 0);
  for (std::size_t k = 1; k < n; ++k) heads[order[k] - 1] = order[rng.below(k)];
  return heads;
}

std::vector<RelationInstance> synthetic_relations(std::size_t count, Vocab& vocab, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<RelationInstance> out;
  const auto labels = relation_labels();
  for (std::size_t i = 0; i < count; ++i) {
    RelationInstance r;
    r.id = "r" + std::to_string(i);
    r.relation = static_cast<int>(rng.below(labels.size()));
    const std::size_t n = 4 + rng.below(7);
    auto& g = r.graph;
    g.heads = random_heads(n, rng);
    for (std::size_t k = 0; k < n; ++k) g.tokens.push_back(vocab.intern(filler(rng.below(12))));
    g.e1 = 1 + rng.below(n);
    do {
      g.e2 = 1 + rng.below(n);
    } while (g.e2 == g.e1);
    // The relation cue sits on the e1 end of the path.
    g.tokens[g.e1 - 1] = vocab.intern("rel" + std::to_string(r.relation));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace treeseq::corpus
