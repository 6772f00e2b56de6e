#ifndef ACCENTMIX_AUDIO_HPP
#define ACCENTMIX_AUDIO_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "accentmix/errors.hpp"

namespace accentmix {

// Mono sampled signal, nominal range [-1, 1]. The unit of all DSP here.
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate_hz = 0;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return sample_rate_hz > 0
               ? static_cast<double>(samples.size()) / sample_rate_hz
               : 0.0;
  }
};

enum class WindowKind { kHamming, kHann, kRect };

std::vector<double> make_window(WindowKind kind, std::size_t len);

// Windowed frames at a fixed hop. original_len is kept so overlap_add can
// truncate the zero-padded tail back to the source length.
struct FrameStack {
  std::vector<std::vector<double>> frames;
  std::size_t frame_len = 0;
  std::size_t hop = 0;
  std::vector<double> window;
  std::size_t original_len = 0;
  int sample_rate_hz = 0;
};

// Reads a 16-bit PCM mono RIFF/WAVE file. Samples are scaled by 1/32768.
// Throws UnsupportedFormat for non-PCM/non-mono/non-16-bit files and
// CorruptFile for truncated or malformed chunk structure.
AudioBuffer read_wav(const std::string& path);

// Writes 16-bit PCM mono. Samples are clamped to [-1, 1 - 2^-15] and rounded
// to the nearest integer, so write(read(x)) is a fixed point.
void write_wav(const AudioBuffer& buffer, const std::string& path);

// Cuts the signal into windowed frames starting at multiples of hop.
// Frame count = 1 + floor((len - frame_len)/hop), plus one zero-padded tail
// frame when the remainder is nonzero. Requires 1 <= hop <= frame_len <= len.
FrameStack frame_signal(const AudioBuffer& buffer, std::size_t frame_len,
                        std::size_t hop,
                        WindowKind window = WindowKind::kHamming);

// Reconstructs a signal of length original_len. Synthesis divides by the
// per-sample sum of shifted analysis windows (the overlap-add normalization),
// which makes frame_signal -> overlap_add exact wherever that sum is
// positive. Hamming and rect windows cover every sample; Hann has a zero
// first coefficient, so sample 0 is not recoverable under it — that is why
// Hamming is the default analysis window.
AudioBuffer overlap_add(const FrameStack& stack);

// Minimum per-sample window coverage over the original signal, relative to
// the mean coverage. A framing is COLA-valid for normalized synthesis when
// this is bounded away from zero (> 1e-6).
double cola_min_coverage(const FrameStack& stack);

}  // namespace accentmix

#endif  // ACCENTMIX_AUDIO_HPP
