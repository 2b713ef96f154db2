#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace treeseq::corpus {

using TokenId = std::uint32_t;

/// Bidirectional token <-> id map with dense ids; id 0 is the reserved unknown token.
class Vocab {
 public:
  static constexpr TokenId kUnk = 0;
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocab();

  /// Returns the existing id or assigns the next one.
  TokenId intern(std::string_view token);
  /// Unseen tokens map to kUnk.
  TokenId lookup(std::string_view token) const;
  std::optional<TokenId> find(std::string_view token) const;
  const std::string& token(TokenId id) const;
  std::size_t size() const noexcept { return tokens_.size(); }

  /// One token per line in id order.
  void save(std::ostream& out) const;
  static Vocab load(std::istream& in);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
};

}  // namespace treeseq::corpus
