#include "treeseq/model/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "treeseq/errors.hpp"

namespace treeseq::model {

namespace {

constexpr std::string_view kMagic = "treeseq-checkpoint v1";

void put_double(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  std::array<char, 8> bytes{};
  for (std::size_t i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xffU);
  out.write(bytes.data(), bytes.size());
}

double get_double(std::istream& in) {
  std::array<char, 8> bytes{};
  if (!in.read(bytes.data(), bytes.size())) throw ParseError("checkpoint payload truncated", 0);
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < 8; ++i) bits |= std::uint64_t{static_cast<unsigned char>(bytes[i])} << (8 * i);
  return std::bit_cast<double>(bits);
}

struct Header {
  std::string name;
  ad::ParamInfo info;
  std::vector<std::size_t> dims;
};

Header parse_header_line(const std::string& line, std::size_t line_number) {
  std::istringstream fields(line);
  Header h;
  int trainable = 0;
  int regularized = 0;
  std::size_t rank = 0;
  if (!(fields >> h.name >> trainable >> regularized >> rank) || rank < 1 || rank > 2) {
    throw ParseError("malformed tensor header '" + line + "'", line_number);
  }
  h.info = {trainable != 0, regularized != 0};
  h.dims.resize(rank);
  for (auto& d : h.dims) {
    if (!(fields >> d) || d == 0) throw ParseError("malformed tensor dims in '" + line + "'", line_number);
  }
  return h;
}

}  // namespace

void write_checkpoint(std::ostream& out, const ad::ParamSet& params) {
  out << kMagic << '\n' << params.size() << '\n';
  for (const auto& e : params.entries()) {
    out << e.name << ' ' << int{e.info.trainable} << ' ' << int{e.info.regularized} << ' ' << e.value.shape().size();
    for (const auto d : e.value.shape()) out << ' ' << d;
    out << '\n';
  }
  for (const auto& e : params.entries()) {
    for (const double v : e.value.data()) put_double(out, v);
  }
  if (!out) throw IoError("failed to write checkpoint");
}

ad::ParamSet read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw ParseError("not a treeseq checkpoint", 1);
  std::size_t count = 0;
  if (!std::getline(in, line)) throw ParseError("missing tensor count", 2);
  try {
    count = std::stoul(line);
  } catch (const std::exception&) {
    throw ParseError("malformed tensor count '" + line + "'", 2);
  }
  std::vector<Header> headers;
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw ParseError("checkpoint header truncated", 3 + i);
    headers.push_back(parse_header_line(line, 3 + i));
  }
  ad::ParamSet params;
  for (const auto& h : headers) {
    ad::Tensor t = h.dims.size() == 1 ? ad::Tensor::vector(h.dims[0]) : ad::Tensor::matrix(h.dims[0], h.dims[1]);
    for (double& v : t.data()) v = get_double(in);
    params.add(h.name, std::move(t), h.info);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw ParseError("trailing bytes after checkpoint payload", 0);
  return params;
}

void save_checkpoint(const std::filesystem::path& path, const ad::ParamSet& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_checkpoint(out, params);
}

ad::ParamSet load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace treeseq::model
