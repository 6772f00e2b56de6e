#ifndef ACCENTMIX_TESTS_HELPERS_HPP
#define ACCENTMIX_TESTS_HELPERS_HPP

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "accentmix/audio.hpp"
#include "accentmix/rng.hpp"

namespace testutil {

inline double rms(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double s : v) acc += s * s;
  return std::sqrt(acc / static_cast<double>(v.size()));
}

inline double snr_db(const std::vector<double>& reference,
                     const std::vector<double>& test) {
  double sig = 0.0, err = 0.0;
  const std::size_t n = std::min(reference.size(), test.size());
  for (std::size_t i = 0; i < n; ++i) {
    sig += reference[i] * reference[i];
    const double d = reference[i] - test[i];
    err += d * d;
  }
  if (err == 0.0) return 300.0;  // effectively exact
  return 10.0 * std::log10(sig / err);
}

inline std::vector<double> random_signal(accentmix::RngStream& rng,
                                         std::size_t n, double peak = 0.5) {
  std::vector<double> out(n);
  for (auto& s : out) s = rng.uniform(-peak, peak);
  return out;
}

// A few sinusoids under an envelope plus weak noise; enough spectral
// structure for LPC to latch onto.
inline accentmix::AudioBuffer speech_like(accentmix::RngStream& rng,
                                          std::size_t n, int rate = 16000) {
  accentmix::AudioBuffer buf;
  buf.sample_rate_hz = rate;
  buf.samples.assign(n, 0.0);
  const int partials = 4;
  for (int k = 0; k < partials; ++k) {
    const double f = rng.uniform(120.0, 3200.0);
    const double amp = rng.uniform(0.05, 0.2);
    const double phase = rng.uniform(0.0, 6.28);
    for (std::size_t i = 0; i < n; ++i)
      buf.samples[i] +=
          amp * std::sin(2.0 * 3.14159265358979323846 * f *
                             static_cast<double>(i) / rate +
                         phase);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double env =
        0.5 + 0.5 * std::sin(2.0 * 3.14159265358979323846 *
                             static_cast<double>(i) / (0.37 * rate));
    buf.samples[i] = buf.samples[i] * env + rng.uniform(-0.01, 0.01);
  }
  return buf;
}

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("accentmix_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& rel = "") const {
    return rel.empty() ? path_.string() : (path_ / rel).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil

#endif  // ACCENTMIX_TESTS_HELPERS_HPP
