#ifndef ACCENTMIX_WER_HPP
#define ACCENTMIX_WER_HPP

#include <span>
#include <string>
#include <vector>

#include "accentmix/errors.hpp"

namespace accentmix {

struct AlignCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;

  std::size_t total() const { return substitutions + deletions + insertions; }
};

// Minimal-edit alignment with unit costs. When several backtraces tie, the
// decomposition prefers substitution over deletion over insertion.
AlignCounts align(std::span<const std::string> ref,
                  std::span<const std::string> hyp);

struct UtteranceErrors {
  std::string id;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_words = 0;
};

struct WerReport {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_words = 0;
  double wer = 0.0;  // pooled: 100 * (S+D+I) / N
  std::vector<UtteranceErrors> per_utterance;
};

struct EvalPair {
  std::string id;
  std::vector<std::string> ref;
  std::vector<std::string> hyp;
};

// Pooled corpus WER: errors and reference words are summed over utterances
// before dividing (this is not the mean of per-utterance WERs). Throws
// EmptyReference naming the first record whose reference has no tokens.
WerReport corpus_wer(const std::vector<EvalPair>& pairs);

// Splits word tokens into single-character tokens (spaces removed), for the
// CER variant of the metric.
std::vector<std::string> char_tokens(std::span<const std::string> words);

// Machine-readable report with wer rounded to two decimals.
std::string wer_report_to_json(const WerReport& report);

}  // namespace accentmix

#endif  // ACCENTMIX_WER_HPP
