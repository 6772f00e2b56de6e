#include "accentmix/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "accentmix/rng.hpp"
#include "accentmix/util.hpp"

namespace accentmix {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* kRequiredFields[] = {"id",         "audio_path", "duration_s",
                                 "transcript", "speaker_id", "corpus",
                                 "accent"};

UtteranceRecord record_from_json(const ordered_json& j,
                                 const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": record is not an object");
  for (const char* field : kRequiredFields)
    if (!j.contains(field))
      throw ParseError(where + ": missing field '" + std::string(field) + "'");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    const bool known =
        std::any_of(std::begin(kRequiredFields), std::end(kRequiredFields),
                    [&](const char* f) { return key == f; }) ||
        key == "alpha";
    if (!known) throw ParseError(where + ": unknown field '" + key + "'");
  }

  UtteranceRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    r.audio_path = j.at("audio_path").get<std::string>();
    r.duration_s = j.at("duration_s").get<double>();
    r.transcript = j.at("transcript").get<std::string>();
    r.speaker_id = j.at("speaker_id").get<std::string>();
    r.corpus = j.at("corpus").get<std::string>();
    r.accent = j.at("accent").get<std::string>();
    if (j.contains("alpha")) r.alpha = j.at("alpha").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(where + ": " + e.what());
  }
  return r;
}

ordered_json record_to_json(const UtteranceRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["audio_path"] = r.audio_path;
  j["duration_s"] = r.duration_s;
  j["transcript"] = r.transcript;
  j["speaker_id"] = r.speaker_id;
  j["corpus"] = r.corpus;
  j["accent"] = r.accent;
  if (r.alpha) j["alpha"] = *r.alpha;
  return j;
}

}  // namespace

double Manifest::total_duration_s() const {
  double total = 0.0;
  for (const auto& r : records) total += r.duration_s;
  return total;
}

Manifest parse_manifest(std::string_view text, const std::string& origin) {
  Manifest m;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    UtteranceRecord r = record_from_json(j, where);
    if (!seen.insert(r.id).second)
      throw DuplicateId(where + ": duplicate id '" + r.id + "'");
    m.records.push_back(std::move(r));
  }
  return m;
}

Manifest load_manifest(const std::string& path) {
  return parse_manifest(read_file(path), path);
}

std::string manifest_to_jsonl(const Manifest& manifest) {
  std::string out;
  for (const auto& r : manifest.records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

void save_manifest(const Manifest& manifest, const std::string& path) {
  write_file(path, manifest_to_jsonl(manifest));
}

CorpusStats compute_stats(const Manifest& manifest) {
  CorpusStats stats;
  std::set<std::string> speakers;
  std::map<std::string, std::set<std::string>> corpus_speakers;
  for (const auto& r : manifest.records) {
    stats.total_duration_s += r.duration_s;
    ++stats.utterance_count;
    speakers.insert(r.speaker_id);
    auto& pc = stats.per_corpus[r.corpus];
    pc.duration_s += r.duration_s;
    ++pc.utterances;
    corpus_speakers[r.corpus].insert(r.speaker_id);
  }
  stats.speaker_count = speakers.size();
  for (auto& [corpus, pc] : stats.per_corpus)
    pc.speakers = corpus_speakers[corpus].size();
  return stats;
}

std::string format_hours_hmm(double seconds) {
  const long long minutes = std::llround(seconds / 60.0);
  const long long h = minutes / 60;
  const long long m = minutes % 60;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld:%02lld", h, m);
  return buf;
}

namespace {

// --- transcript normalization helpers -------------------------------------

std::vector<char32_t> decode_utf8(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    char32_t cp = 0;
    std::size_t extra = 0;
    if (c < 0x80) {
      cp = c;
    } else if ((c >> 5) == 0x6) {
      cp = c & 0x1f;
      extra = 1;
    } else if ((c >> 4) == 0xe) {
      cp = c & 0x0f;
      extra = 2;
    } else if ((c >> 3) == 0x1e) {
      cp = c & 0x07;
      extra = 3;
    } else {
      ++i;  // stray continuation byte; drop it
      continue;
    }
    if (i + extra >= s.size()) break;  // truncated sequence at end
    bool ok = true;
    for (std::size_t k = 1; k <= extra; ++k) {
      if (i + k >= s.size() ||
          (static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3f);
    }
    i += extra + 1;
    if (ok) out.push_back(cp);
  }
  return out;
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  }
}

// NFC composition for the combining marks that occur in French text.
char32_t compose(char32_t base, char32_t mark) {
  struct Entry {
    char32_t base, mark, composed;
  };
  static const Entry kTable[] = {
      {'a', 0x300, 0xE0}, {'e', 0x300, 0xE8}, {'i', 0x300, 0xEC},
      {'o', 0x300, 0xF2}, {'u', 0x300, 0xF9}, {'A', 0x300, 0xC0},
      {'E', 0x300, 0xC8}, {'I', 0x300, 0xCC}, {'O', 0x300, 0xD2},
      {'U', 0x300, 0xD9}, {'a', 0x301, 0xE1}, {'e', 0x301, 0xE9},
      {'i', 0x301, 0xED}, {'o', 0x301, 0xF3}, {'u', 0x301, 0xFA},
      {'y', 0x301, 0xFD}, {'A', 0x301, 0xC1}, {'E', 0x301, 0xC9},
      {'I', 0x301, 0xCD}, {'O', 0x301, 0xD3}, {'U', 0x301, 0xDA},
      {'a', 0x302, 0xE2}, {'e', 0x302, 0xEA}, {'i', 0x302, 0xEE},
      {'o', 0x302, 0xF4}, {'u', 0x302, 0xFB}, {'A', 0x302, 0xC2},
      {'E', 0x302, 0xCA}, {'I', 0x302, 0xCE}, {'O', 0x302, 0xD4},
      {'U', 0x302, 0xDB}, {'a', 0x303, 0xE3}, {'n', 0x303, 0xF1},
      {'o', 0x303, 0xF5}, {'A', 0x303, 0xC3}, {'N', 0x303, 0xD1},
      {'O', 0x303, 0xD5}, {'a', 0x308, 0xE4}, {'e', 0x308, 0xEB},
      {'i', 0x308, 0xEF}, {'o', 0x308, 0xF6}, {'u', 0x308, 0xFC},
      {'y', 0x308, 0xFF}, {'A', 0x308, 0xC4}, {'E', 0x308, 0xCB},
      {'I', 0x308, 0xCF}, {'O', 0x308, 0xD6}, {'U', 0x308, 0xDC},
      {'c', 0x327, 0xE7}, {'C', 0x327, 0xC7},
  };
  for (const auto& e : kTable)
    if (e.base == base && e.mark == mark) return e.composed;
  return 0;
}

bool is_combining_mark(char32_t cp) { return cp >= 0x300 && cp <= 0x36F; }

char32_t lowercase(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;  // Latin-1
  if (cp == 0x152) return 0x153;  // OE ligature
  if (cp == 0x178) return 0xFF;   // Y with diaeresis
  return cp;
}

bool is_space_cp(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' ||
         cp == '\v' || cp == 0xA0 || (cp >= 0x2000 && cp <= 0x200A) ||
         cp == 0x2028 || cp == 0x2029 || cp == 0x3000;
}

bool is_word_cp(char32_t cp) {
  if (cp < 0x80)
    return (cp >= 'a' && cp <= 'z') || (cp >= '0' && cp <= '9');
  // Latin-1 punctuation block and the two arithmetic signs are stripped;
  // remaining non-ASCII codepoints count as word characters, so unexpected
  // scripts pass through rather than vanish.
  if (cp >= 0xA1 && cp <= 0xBF) return false;
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2010 && cp <= 0x205E) return false;  // general punctuation
  if (is_combining_mark(cp)) return false;
  return true;
}

}  // namespace

std::vector<std::string> normalize_transcript(std::string_view text) {
  std::vector<char32_t> raw = decode_utf8(text);

  // Pass 1: canonicalize punctuation variants and compose diacritics.
  std::vector<char32_t> cps;
  cps.reserve(raw.size());
  for (char32_t cp : raw) {
    if (cp == 0x2019 || cp == 0x02BC) cp = '\'';
    if (cp == 0x2010 || cp == 0x2011 || cp == 0x2013) cp = '-';
    if (is_combining_mark(cp) && !cps.empty()) {
      if (char32_t c = compose(cps.back(), cp)) {
        cps.back() = c;
        continue;
      }
    }
    cps.push_back(cp);
  }

  // Pass 2: lowercase, map punctuation to separators, keep apostrophes and
  // hyphens only between word characters.
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = lowercase(cps[i]);
    if (is_space_cp(cp)) {
      flush();
      continue;
    }
    if (cp == '\'' || cp == '-') {
      const bool prev_word = !current.empty();
      const bool next_word =
          i + 1 < cps.size() && is_word_cp(lowercase(cps[i + 1]));
      if (prev_word && next_word)
        encode_utf8(cp, current);
      else
        flush();
      continue;
    }
    if (is_word_cp(cp)) {
      encode_utf8(cp, current);
    } else {
      flush();  // punctuation acts as a separator
    }
  }
  flush();
  return tokens;
}

std::map<std::string, Manifest> speaker_disjoint_split(
    const Manifest& manifest, const std::vector<SplitTarget>& targets,
    std::uint64_t seed, const std::string& remainder_name) {
  struct SpeakerInfo {
    std::string id;
    double duration = 0.0;
    std::uint64_t tiebreak = 0;
  };

  std::unordered_map<std::string, double> speaker_duration;
  for (const auto& r : manifest.records)
    speaker_duration[r.speaker_id] += r.duration_s;

  const std::size_t n_splits = targets.size();
  if (speaker_duration.size() < n_splits)
    throw InfeasibleSplit("fewer speakers (" +
                          std::to_string(speaker_duration.size()) +
                          ") than splits (" + std::to_string(n_splits) + ")");

  std::set<std::string> names;
  for (const auto& t : targets)
    if (!names.insert(t.name).second)
      throw InfeasibleSplit("duplicate split name '" + t.name + "'");
  if (!remainder_name.empty() && names.count(remainder_name))
    throw InfeasibleSplit("remainder name collides with split '" +
                          remainder_name + "'");

  std::vector<SpeakerInfo> speakers;
  speakers.reserve(speaker_duration.size());
  for (const auto& [id, dur] : speaker_duration)
    speakers.push_back({id, dur, hash_seed(seed, id)});
  std::sort(speakers.begin(), speakers.end(),
            [](const SpeakerInfo& a, const SpeakerInfo& b) {
              if (a.duration != b.duration) return a.duration > b.duration;
              if (a.tiebreak != b.tiebreak) return a.tiebreak < b.tiebreak;
              return a.id < b.id;
            });

  std::vector<double> deficit(n_splits), tolerance(n_splits);
  for (std::size_t i = 0; i < n_splits; ++i) {
    deficit[i] = targets[i].hours * 3600.0;
    tolerance[i] = 0.10 * deficit[i];
  }

  std::unordered_map<std::string, std::size_t> assignment;  // speaker -> split
  const std::size_t kRemainder = n_splits;
  for (const auto& s : speakers) {
    // Largest remaining deficit among splits that can absorb this speaker
    // without overshooting their tolerance.
    std::size_t best = kRemainder;
    double best_deficit = 0.0;
    for (std::size_t i = 0; i < n_splits; ++i) {
      if (deficit[i] <= 0.0) continue;
      if (s.duration > deficit[i] + tolerance[i]) continue;
      if (deficit[i] > best_deficit) {
        best_deficit = deficit[i];
        best = i;
      }
    }
    if (best == kRemainder && remainder_name.empty()) {
      // No remainder allowed: overshoot the largest open deficit rather
      // than lose the speaker; error only when every target is filled.
      for (std::size_t i = 0; i < n_splits; ++i)
        if (deficit[i] > 0.0 && (best == kRemainder || deficit[i] > deficit[best]))
          best = i;
      if (best == kRemainder)
        throw InfeasibleSplit("speaker '" + s.id +
                              "' cannot be placed: all targets filled and no "
                              "remainder split allowed");
    }
    assignment[s.id] = best;
    if (best != kRemainder) deficit[best] -= s.duration;
  }

  std::map<std::string, Manifest> out;
  for (const auto& t : targets) out[t.name];
  if (!remainder_name.empty()) out[remainder_name];
  for (const auto& r : manifest.records) {
    const std::size_t idx = assignment.at(r.speaker_id);
    const std::string& name =
        idx == kRemainder ? remainder_name : targets[idx].name;
    out[name].records.push_back(r);
  }
  return out;
}

std::vector<std::string> speaker_overlap(const Manifest& a, const Manifest& b) {
  std::set<std::string> sa, sb;
  for (const auto& r : a.records) sa.insert(r.speaker_id);
  for (const auto& r : b.records) sb.insert(r.speaker_id);
  std::vector<std::string> out;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                        std::back_inserter(out));
  return out;
}

}  // namespace accentmix
