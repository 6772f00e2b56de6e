#include "accentmix/wer.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace accentmix {

AlignCounts align(std::span<const std::string> ref,
                  std::span<const std::string> hyp) {
  const std::size_t m = ref.size();
  const std::size_t n = hyp.size();

  // d[i][j]: edit distance between ref[0..i) and hyp[0..j).
  std::vector<std::vector<std::size_t>> d(m + 1,
                                          std::vector<std::size_t>(n + 1));
  for (std::size_t i = 0; i <= m; ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= n; ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const std::size_t sub =
          d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const std::size_t del = d[i - 1][j] + 1;
      const std::size_t ins = d[i][j - 1] + 1;
      d[i][j] = std::min({sub, del, ins});
    }
  }

  // Backtrace; on ties prefer substitution, then deletion, then insertion.
  AlignCounts counts;
  std::size_t i = m, j = n;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool match = ref[i - 1] == hyp[j - 1];
      if (d[i][j] == d[i - 1][j - 1] + (match ? 0 : 1)) {
        if (!match) ++counts.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      ++counts.deletions;
      --i;
      continue;
    }
    ++counts.insertions;
    --j;
  }
  return counts;
}

WerReport corpus_wer(const std::vector<EvalPair>& pairs) {
  WerReport report;
  for (const auto& p : pairs) {
    if (p.ref.empty())
      throw EmptyReference("record '" + p.id +
                           "' has an empty reference after normalization");
    const AlignCounts c = align(p.ref, p.hyp);
    report.substitutions += c.substitutions;
    report.deletions += c.deletions;
    report.insertions += c.insertions;
    report.ref_words += p.ref.size();
    report.per_utterance.push_back(
        {p.id, c.substitutions, c.deletions, c.insertions, p.ref.size()});
  }
  if (report.ref_words > 0)
    report.wer = 100.0 *
                 static_cast<double>(report.substitutions + report.deletions +
                                     report.insertions) /
                 static_cast<double>(report.ref_words);
  return report;
}

std::vector<std::string> char_tokens(std::span<const std::string> words) {
  std::vector<std::string> out;
  for (const auto& w : words) {
    std::size_t i = 0;
    while (i < w.size()) {
      // One UTF-8 sequence per token.
      std::size_t len = 1;
      const unsigned char c = static_cast<unsigned char>(w[i]);
      if ((c >> 5) == 0x6) len = 2;
      else if ((c >> 4) == 0xe) len = 3;
      else if ((c >> 3) == 0x1e) len = 4;
      len = std::min(len, w.size() - i);
      out.push_back(w.substr(i, len));
      i += len;
    }
  }
  return out;
}

std::string wer_report_to_json(const WerReport& report) {
  nlohmann::ordered_json j;
  j["substitutions"] = report.substitutions;
  j["deletions"] = report.deletions;
  j["insertions"] = report.insertions;
  j["ref_words"] = report.ref_words;
  j["wer"] = std::round(report.wer * 100.0) / 100.0;
  j["per_utterance"] = nlohmann::ordered_json::array();
  for (const auto& u : report.per_utterance) {
    nlohmann::ordered_json uj;
    uj["id"] = u.id;
    uj["substitutions"] = u.substitutions;
    uj["deletions"] = u.deletions;
    uj["insertions"] = u.insertions;
    uj["ref_words"] = u.ref_words;
    j["per_utterance"].push_back(uj);
  }
  return j.dump(2) + "\n";
}

}  // namespace accentmix
