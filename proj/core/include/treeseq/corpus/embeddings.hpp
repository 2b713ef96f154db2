#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "treeseq/autodiff/tensor.hpp"
#include "treeseq/corpus/vocab.hpp"

namespace treeseq::corpus {

/// |V| x K word vectors.
struct EmbeddingTable {
  ad::Tensor matrix;
  bool trainable = true;

  std::size_t dim() const noexcept { return matrix.cols(); }
};

struct EmbeddingLoad {
  EmbeddingTable table;
  /// Fraction of vocabulary rows filled from the file.
  double coverage = 0.0;
  std::size_t found = 0;
  std::vector<std::string> warnings;
};

/// Half-width of the uniform range used for rows not found in a pretrained file.
inline constexpr double kOovInitRange = 0.05;

EmbeddingTable random_embeddings(std::size_t vocab_size, std::size_t dim, std::uint64_t seed,
                                 double range = kOovInitRange);

/// Reads word2vec-style text vectors ("token v1 ... vK" per line, optional
/// "count dim" header). Rows absent from the file are drawn uniformly from
/// (-0.05, 0.05) with `seed`; a token listed twice keeps its last vector.
EmbeddingLoad read_embeddings(std::istream& in, const Vocab& vocab, std::size_t dim, std::uint64_t seed);
EmbeddingLoad load_embeddings(const std::filesystem::path& path, const Vocab& vocab, std::size_t dim,
                              std::uint64_t seed);

}  // namespace treeseq::corpus
