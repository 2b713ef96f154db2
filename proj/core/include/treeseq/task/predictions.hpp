#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace treeseq::task {

/// One scored prediction. Ids of treebank node predictions are
/// "<sentence>:root", "<sentence>:p<begin>-<end>" (inner phrase) or
/// "<sentence>:w<position>" (single word); any other id is a whole example.
struct Prediction {
  std::string id;
  int gold = 0;
  int predicted = 0;
  /// Class probabilities, or negated candidate losses for QA.
  std::vector<double> scores;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

enum class UnitKind { root, phrase, word };

UnitKind unit_kind(std::string_view id);

std::string root_id(std::string_view example);
std::string phrase_id(std::string_view example, std::size_t begin, std::size_t end);
std::string word_id(std::string_view example, std::size_t position);

/// "id <TAB> gold <TAB> predicted <TAB> score..." per line; scores round-trip exactly.
void write_predictions(std::ostream& out, std::span<const Prediction> predictions);
/// Throws ParseError (with line number) on malformed lines and duplicate ids.
std::vector<Prediction> read_predictions(std::istream& in);

}  // namespace treeseq::task
