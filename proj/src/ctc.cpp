#include "accentmix/ctc.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>

#include <json.hpp>

#include "accentmix/util.hpp"

namespace accentmix {

namespace {
constexpr char kMagic[8] = {'A', 'M', 'X', 'L', 'O', 'G', 'I', 'T'};
constexpr double kRowSumTol = 1e-3;

void put_u32le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}
}  // namespace

std::string greedy_decode(const LogitMatrix& matrix) {
  if (matrix.vocab.size() != matrix.vocab_size)
    throw MalformedMatrix("vocab size " + std::to_string(matrix.vocab.size()) +
                          " does not match matrix width " +
                          std::to_string(matrix.vocab_size));
  if (matrix.blank_index >= matrix.vocab_size)
    throw MalformedMatrix("blank_index out of range");
  if (matrix.values.size() != matrix.frames * matrix.vocab_size)
    throw MalformedMatrix("value count does not match T x V");

  std::string out;
  std::size_t prev = matrix.vocab_size;  // sentinel: nothing collapsed yet
  for (std::size_t t = 0; t < matrix.frames; ++t) {
    const float* row = matrix.values.data() + t * matrix.vocab_size;

    double sum = 0.0;
    for (std::size_t v = 0; v < matrix.vocab_size; ++v)
      sum += std::exp(static_cast<double>(row[v]));
    if (std::abs(sum - 1.0) > kRowSumTol)
      throw MalformedMatrix("row " + std::to_string(t) +
                            " exponentiates to " + std::to_string(sum));

    std::size_t best = 0;
    for (std::size_t v = 1; v < matrix.vocab_size; ++v)
      if (row[v] > row[best]) best = v;  // ties keep the lowest index

    if (best != prev && best != matrix.blank_index) out += matrix.vocab[best];
    prev = best;
  }
  return out;
}

void write_logits(const std::string& path, const LogitMatrix& matrix) {
  if (matrix.values.size() != matrix.frames * matrix.vocab_size)
    throw MalformedMatrix("value count does not match T x V");
  std::string out;
  out.reserve(20 + matrix.values.size() * 4);
  out.append(kMagic, sizeof(kMagic));
  put_u32le(out, static_cast<std::uint32_t>(matrix.frames));
  put_u32le(out, static_cast<std::uint32_t>(matrix.vocab_size));
  put_u32le(out, static_cast<std::uint32_t>(matrix.blank_index));
  for (float v : matrix.values) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32le(out, bits);
  }
  write_file(path, out);
}

LogitMatrix read_logits(const std::string& path,
                        const std::vector<std::string>& vocab) {
  const std::string bytes = read_file(path);
  if (bytes.size() < 20) throw MalformedMatrix(path + ": too short");
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw MalformedMatrix(path + ": bad magic");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());

  LogitMatrix m;
  m.frames = read_u32le(p + 8);
  m.vocab_size = read_u32le(p + 12);
  m.blank_index = read_u32le(p + 16);
  const std::size_t expect = 20 + m.frames * m.vocab_size * 4;
  if (bytes.size() != expect)
    throw MalformedMatrix(path + ": expected " + std::to_string(expect) +
                          " bytes, found " + std::to_string(bytes.size()));
  m.values.resize(m.frames * m.vocab_size);
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    const std::uint32_t bits = read_u32le(p + 20 + 4 * i);
    std::memcpy(&m.values[i], &bits, 4);
  }
  m.vocab = vocab;
  if (m.vocab.size() != m.vocab_size)
    throw MalformedMatrix(path + ": vocab has " +
                          std::to_string(vocab.size()) + " tokens, matrix " +
                          std::to_string(m.vocab_size));
  return m;
}

std::vector<std::string> load_vocab(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!j.is_array()) throw ParseError(path + ": vocab must be a JSON list");
  std::vector<std::string> vocab;
  for (const auto& t : j) {
    if (!t.is_string()) throw ParseError(path + ": vocab tokens must be strings");
    vocab.push_back(t.get<std::string>());
  }
  return vocab;
}

void save_vocab(const std::vector<std::string>& vocab,
                const std::string& path) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& t : vocab) j.push_back(t);
  write_file(path, j.dump() + "\n");
}

}  // namespace accentmix
