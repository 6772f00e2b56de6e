#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "accentmix/ctc.hpp"
#include "accentmix/rng.hpp"
#include "accentmix/util.hpp"
#include "helpers.hpp"

using namespace accentmix;
using testutil::TempDir;

namespace {

// Builds a log-softmax row with the winner near probability mass 1.
std::vector<float> one_hot_row(std::size_t vocab, std::size_t winner) {
  const double win_p = 0.9;
  const double rest = (1.0 - win_p) / static_cast<double>(vocab - 1);
  std::vector<float> row(vocab);
  for (std::size_t v = 0; v < vocab; ++v)
    row[v] = static_cast<float>(std::log(v == winner ? win_p : rest));
  return row;
}

LogitMatrix matrix_from_path(const std::vector<std::size_t>& path,
                             const std::vector<std::string>& vocab,
                             std::size_t blank) {
  LogitMatrix m;
  m.frames = path.size();
  m.vocab_size = vocab.size();
  m.vocab = vocab;
  m.blank_index = blank;
  for (std::size_t winner : path) {
    const auto row = one_hot_row(vocab.size(), winner);
    m.values.insert(m.values.end(), row.begin(), row.end());
  }
  return m;
}

// Independent statement of the decode rule: collapse repeats, then drop
// blanks, then join.
std::string collapse_oracle(const std::vector<std::size_t>& path,
                            const std::vector<std::string>& vocab,
                            std::size_t blank) {
  std::vector<std::size_t> collapsed;
  for (std::size_t idx : path)
    if (collapsed.empty() || collapsed.back() != idx) collapsed.push_back(idx);
  std::string out;
  for (std::size_t idx : collapsed)
    if (idx != blank) out += vocab[idx];
  return out;
}

const std::vector<std::string> kVocab{"_", "a", "b", "c"};

}  // namespace

TEST_CASE("all-blank path decodes to the empty string") {
  const LogitMatrix m = matrix_from_path({0, 0, 0, 0}, kVocab, 0);
  CHECK(greedy_decode(m) == "");
}

TEST_CASE("collapse then delete blanks: [a a _ a b] -> aab") {
  const LogitMatrix m = matrix_from_path({1, 1, 0, 1, 2}, kVocab, 0);
  CHECK(greedy_decode(m) == "aab");
}

TEST_CASE("argmax ties break toward the lowest index") {
  LogitMatrix m;
  m.frames = 1;
  m.vocab_size = 4;
  m.vocab = kVocab;
  m.blank_index = 0;
  const float quarter = static_cast<float>(std::log(0.25));
  m.values = {quarter, quarter, quarter, quarter};  // exact four-way tie
  CHECK(greedy_decode(m) == "");  // index 0 wins, and 0 is the blank

  m.blank_index = 3;
  CHECK(greedy_decode(m) == "_");  // lowest index 0 again, now a real token
}

TEST_CASE("decode equals the collapse oracle on random paths") {
  RngStream rng(120);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t frames = 1 + rng.below(20);
    std::vector<std::size_t> path(frames);
    for (auto& p : path) p = rng.below(kVocab.size());
    const LogitMatrix m = matrix_from_path(path, kVocab, 0);
    REQUIRE(greedy_decode(m) == collapse_oracle(path, kVocab, 0));
  }
}

TEST_CASE("duplicating a frame never changes the decode") {
  RngStream rng(121);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t frames = 2 + rng.below(12);
    std::vector<std::size_t> path(frames);
    for (auto& p : path) p = rng.below(kVocab.size());
    const std::string base =
        greedy_decode(matrix_from_path(path, kVocab, 0));

    const std::size_t dup = rng.below(frames);
    std::vector<std::size_t> doubled = path;
    doubled.insert(doubled.begin() + static_cast<std::ptrdiff_t>(dup),
                   path[dup]);
    REQUIRE(greedy_decode(matrix_from_path(doubled, kVocab, 0)) == base);
  }
}

TEST_CASE("a blank between equal tokens splits them into two emissions") {
  // The collapse-then-delete rule makes [a a] decode to "a" but
  // [a _ a] decode to "aa"; blank insertion is only a no-op at positions
  // that do not split a repeat run.
  CHECK(greedy_decode(matrix_from_path({1, 1}, kVocab, 0)) == "a");
  CHECK(greedy_decode(matrix_from_path({1, 0, 1}, kVocab, 0)) == "aa");
}

TEST_CASE("inserting a blank frame never changes the decode") {
  RngStream rng(122);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t frames = 2 + rng.below(12);
    std::vector<std::size_t> path(frames);
    for (auto& p : path) p = rng.below(kVocab.size());
    const std::string base =
        greedy_decode(matrix_from_path(path, kVocab, 0));

    // A blank introduced between frames only matters if it splits two equal
    // tokens into two separate emissions; splitting at a boundary of
    // different tokens is a no-op.
    for (std::size_t pos = 0; pos <= path.size(); ++pos) {
      const bool splits_repeat = pos > 0 && pos < path.size() &&
                                 path[pos - 1] == path[pos] &&
                                 path[pos] != 0;
      if (splits_repeat) continue;
      std::vector<std::size_t> with_blank = path;
      with_blank.insert(with_blank.begin() + static_cast<std::ptrdiff_t>(pos),
                        0);
      REQUIRE(greedy_decode(matrix_from_path(with_blank, kVocab, 0)) == base);
    }
  }
}

TEST_CASE("rows that are not log-softmax are rejected") {
  LogitMatrix m = matrix_from_path({1, 2}, kVocab, 0);
  m.values[0] = 0.5f;  // exp(0.5) alone already breaks the sum
  CHECK_THROWS_AS(greedy_decode(m), MalformedMatrix);
}

TEST_CASE("logit container round trip") {
  TempDir dir("ctc_io");
  RngStream rng(123);
  std::vector<std::size_t> path(25);
  for (auto& p : path) p = rng.below(kVocab.size());
  const LogitMatrix m = matrix_from_path(path, kVocab, 0);

  const std::string bin = dir.str("utt.logits");
  write_logits(bin, m);
  save_vocab(kVocab, dir.str("vocab.json"));
  const auto vocab = load_vocab(dir.str("vocab.json"));
  REQUIRE(vocab == kVocab);

  const LogitMatrix back = read_logits(bin, vocab);
  CHECK(back.frames == m.frames);
  CHECK(back.vocab_size == m.vocab_size);
  CHECK(back.blank_index == m.blank_index);
  CHECK(back.values == m.values);
  CHECK(greedy_decode(back) == greedy_decode(m));
}

TEST_CASE("malformed logit files are rejected") {
  TempDir dir("ctc_bad");
  SUBCASE("bad magic") {
    write_file(dir.str("x.logits"), "NOTMAGIC" + std::string(12, '\0'));
    CHECK_THROWS_AS(read_logits(dir.str("x.logits"), kVocab),
                    MalformedMatrix);
  }
  SUBCASE("truncated payload") {
    LogitMatrix m = matrix_from_path({1, 2, 3}, kVocab, 0);
    write_logits(dir.str("t.logits"), m);
    std::string bytes = read_file(dir.str("t.logits"));
    bytes.resize(bytes.size() - 7);
    write_file(dir.str("t.logits"), bytes);
    CHECK_THROWS_AS(read_logits(dir.str("t.logits"), kVocab),
                    MalformedMatrix);
  }
  SUBCASE("vocab size mismatch") {
    LogitMatrix m = matrix_from_path({1}, kVocab, 0);
    write_logits(dir.str("v.logits"), m);
    CHECK_THROWS_AS(
        read_logits(dir.str("v.logits"), {"_", "a"}),
        MalformedMatrix);
  }
}
