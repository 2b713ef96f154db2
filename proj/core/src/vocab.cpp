#include "treeseq/corpus/vocab.hpp"

#include <istream>
#include <ostream>

#include "treeseq/errors.hpp"

namespace treeseq::corpus {

Vocab::Vocab() { intern(kUnkToken); }

TokenId Vocab::intern(std::string_view token) {
  if (auto it = ids_.find(std::string(token)); it != ids_.end()) return it->second;
  const auto id = static_cast<TokenId>(tokens_.size());
  tokens_.emplace_back(token);
  ids_.emplace(tokens_.back(), id);
  return id;
}

TokenId Vocab::lookup(std::string_view token) const { return find(token).value_or(kUnk); }

std::optional<TokenId> Vocab::find(std::string_view token) const {
  if (auto it = ids_.find(std::string(token)); it != ids_.end()) return it->second;
  return std::nullopt;
}

const std::string& Vocab::token(TokenId id) const {
  if (id >= tokens_.size()) throw ValidationError("token id " + std::to_string(id) + " outside vocabulary");
  return tokens_[id];
}

void Vocab::save(std::ostream& out) const {
  for (const auto& t : tokens_) out << t << '\n';
}

Vocab Vocab::load(std::istream& in) {
  Vocab vocab;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line_number == 1) {
      if (line != kUnkToken) throw ParseError("vocabulary must start with " + std::string(kUnkToken), 1);
      continue;
    }
    if (line.empty()) throw ParseError("empty vocabulary entry", line_number);
    if (vocab.find(line)) throw ParseError("duplicate vocabulary entry '" + line + "'", line_number);
    vocab.intern(line);
  }
  return vocab;
}

}  // namespace treeseq::corpus
