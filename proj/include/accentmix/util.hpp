#ifndef ACCENTMIX_UTIL_HPP
#define ACCENTMIX_UTIL_HPP

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

namespace accentmix {

// Shortest decimal representation that round-trips the double (e.g. "9.5",
// "18.71"). Keeps CSV and JSON outputs byte-deterministic.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Fixed two-decimal formatting used for WER percentages in reports.
std::string format_fixed2(double v);

std::vector<std::string> split_string(std::string_view s, char sep);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace accentmix

#endif  // ACCENTMIX_UTIL_HPP
