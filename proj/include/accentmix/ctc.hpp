#ifndef ACCENTMIX_CTC_HPP
#define ACCENTMIX_CTC_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "accentmix/errors.hpp"

namespace accentmix {

// Per-frame token log-probabilities (row-major T x V) with the vocabulary
// they index into. Rows are expected to be log-softmax normalized.
struct LogitMatrix {
  std::size_t frames = 0;
  std::size_t vocab_size = 0;
  std::vector<float> values;
  std::vector<std::string> vocab;
  std::size_t blank_index = 0;
};

// Best-path decode: per-frame argmax (ties go to the lowest index), collapse
// consecutive repeats, delete blanks, concatenate the surviving tokens.
// Throws MalformedMatrix when a row's exponentiated sum strays from 1 by
// more than 1e-3.
std::string greedy_decode(const LogitMatrix& matrix);

// Binary container: 8-byte magic "AMXLOGIT", then uint32 T, V, blank_index
// (little-endian), then T*V float32 values row-major. The vocabulary lives
// in a JSON sidecar (a list of token strings).
void write_logits(const std::string& path, const LogitMatrix& matrix);
LogitMatrix read_logits(const std::string& path,
                        const std::vector<std::string>& vocab);

std::vector<std::string> load_vocab(const std::string& path);
void save_vocab(const std::vector<std::string>& vocab,
                const std::string& path);

}  // namespace accentmix

#endif  // ACCENTMIX_CTC_HPP
