#ifndef ACCENTMIX_MANIFEST_HPP
#define ACCENTMIX_MANIFEST_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "accentmix/errors.hpp"

namespace accentmix {

// One transcribed utterance. audio_path is relative to the manifest's
// directory unless a caller supplies an explicit root.
struct UtteranceRecord {
  std::string id;
  std::string audio_path;
  double duration_s = 0.0;
  std::string transcript;
  std::string speaker_id;
  std::string corpus;
  std::string accent;
  std::optional<double> alpha;  // present only for McAdams-augmented records
};

struct Manifest {
  std::vector<UtteranceRecord> records;

  double total_duration_s() const;
  std::size_t size() const { return records.size(); }
};

// JSON Lines, one record per line. Field names are fixed: id, audio_path,
// duration_s, transcript, speaker_id, corpus, accent, alpha (optional).
// Throws ParseError with a 1-based line number, or DuplicateId.
Manifest load_manifest(const std::string& path);
Manifest parse_manifest(std::string_view text, const std::string& origin);
void save_manifest(const Manifest& manifest, const std::string& path);
std::string manifest_to_jsonl(const Manifest& manifest);

struct PerCorpusStats {
  double duration_s = 0.0;
  std::size_t utterances = 0;
  std::size_t speakers = 0;
};

struct CorpusStats {
  double total_duration_s = 0.0;
  std::size_t utterance_count = 0;
  std::size_t speaker_count = 0;
  std::map<std::string, PerCorpusStats> per_corpus;
};

CorpusStats compute_stats(const Manifest& manifest);

// Renders seconds as H:MM (e.g. 202260 s -> "56:11").
std::string format_hours_hmm(double seconds);

// Lowercases, strips punctuation except intra-word apostrophes and hyphens,
// collapses whitespace and splits on spaces. Combining diacritics common in
// French are composed first (NFC for the Latin range); U+2019 is treated as
// an apostrophe.
std::vector<std::string> normalize_transcript(std::string_view text);

struct SplitTarget {
  std::string name;
  double hours = 0.0;
};

// Assigns whole speakers to splits so no speaker crosses a split boundary.
// Greedy: speakers in descending total duration (ties broken by a seeded
// hash) go to the split with the largest remaining deficit; once every
// deficit is filled, remaining speakers land in the remainder split, which
// is always present in the result. Throws InfeasibleSplit when the split
// count is not below the speaker count, or when a speaker cannot be placed
// and no remainder is allowed (empty remainder_name).
std::map<std::string, Manifest> speaker_disjoint_split(
    const Manifest& manifest, const std::vector<SplitTarget>& targets,
    std::uint64_t seed, const std::string& remainder_name = "rest");

// Speakers present in both manifests; empty means speaker-disjoint.
std::vector<std::string> speaker_overlap(const Manifest& a, const Manifest& b);

}  // namespace accentmix

#endif  // ACCENTMIX_MANIFEST_HPP
