#include "treeseq/corpus/embeddings.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "treeseq/errors.hpp"
#include "treeseq/random.hpp"

namespace treeseq::corpus {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  // from_chars for double is available in libstdc++ 11.
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool is_count_header(const std::vector<std::string_view>& fields) {
  if (fields.size() != 2) return false;
  for (auto f : fields) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || ptr != f.data() + f.size()) return false;
  }
  return true;
}

}  // namespace

EmbeddingTable random_embeddings(std::size_t vocab_size, std::size_t dim, std::uint64_t seed, double range) {
  EmbeddingTable table;
  table.matrix = ad::Tensor::matrix(vocab_size, dim);
  Rng rng(seed);
  for (double& x : table.matrix.data()) x = rng.uniform(-range, range);
  return table;
}

EmbeddingLoad read_embeddings(std::istream& in, const Vocab& vocab, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw ValidationError("embedding dimension must be positive");
  EmbeddingLoad result;
  result.table = random_embeddings(vocab.size(), dim, seed);
  std::vector<bool> filled(vocab.size(), false);

  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (line_number == 1 && is_count_header(fields)) {
      std::size_t header_dim = 0;
      std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), header_dim);
      if (header_dim != dim) {
        throw ValidationError("embedding file dimension " + std::to_string(header_dim) + " does not match K=" +
                              std::to_string(dim));
      }
      continue;
    }
    if (fields.size() != dim + 1) {
      if (fields.size() >= 2) {
        throw ParseError("expected " + std::to_string(dim) + " values, found " + std::to_string(fields.size() - 1) +
                             " (dimension mismatch)",
                         line_number);
      }
      throw ParseError("malformed embedding line", line_number);
    }
    std::vector<double> values(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      if (!parse_double(fields[k + 1], values[k])) {
        throw ParseError("malformed number '" + std::string(fields[k + 1]) + "'", line_number);
      }
    }
    const auto id = vocab.find(fields[0]);
    if (!id) continue;
    if (filled[*id]) {
      result.warnings.push_back("line " + std::to_string(line_number) + ": duplicate token '" +
                                std::string(fields[0]) + "', last occurrence wins");
    } else {
      filled[*id] = true;
      ++result.found;
    }
    auto row = result.table.matrix.row(*id);
    std::copy(values.begin(), values.end(), row.begin());
  }
  result.coverage = static_cast<double>(result.found) / static_cast<double>(vocab.size());
  return result;
}

EmbeddingLoad load_embeddings(const std::filesystem::path& path, const Vocab& vocab, std::size_t dim,
                              std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read embeddings file " + path.string());
  return read_embeddings(in, vocab, dim, seed);
}

}  // namespace treeseq::corpus
