#include "accentmix/augment_td.hpp"

#include <algorithm>
#include <cmath>

#include "accentmix/errors.hpp"

namespace accentmix {

namespace {
constexpr double kPi = 3.14159265358979323846;

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}
}  // namespace

void TdAugmentConfig::validate() const {
  if (speed_factors.empty()) throw Error("speed_factors must be non-empty");
  for (double f : speed_factors)
    if (!(f >= 0.5 && f <= 2.0))
      throw InvalidFactor("speed factor " + std::to_string(f) +
                          " outside [0.5, 2.0]");
  if (chunk_count_min < 0 || chunk_count_max < chunk_count_min)
    throw Error("bad chunk count range");
  if (band_count_min < 0 || band_count_max < band_count_min)
    throw Error("bad band count range");
  if (chunk_len_ms_min < 0 || chunk_len_ms_max < chunk_len_ms_min)
    throw Error("bad chunk length range");
  if (band_width_hz <= 0) throw Error("band_width_hz must be positive");
}

AudioBuffer perturb_speed(const AudioBuffer& buffer, double factor) {
  if (!(factor >= 0.5 && factor <= 2.0))
    throw InvalidFactor("speed factor " + std::to_string(factor) +
                        " outside [0.5, 2.0]");
  if (factor == 1.0) return buffer;

  const std::size_t in_len = buffer.size();
  const std::size_t out_len = static_cast<std::size_t>(
      std::llround(static_cast<double>(in_len) / factor));

  AudioBuffer out;
  out.sample_rate_hz = buffer.sample_rate_hz;
  out.samples.resize(out_len, 0.0);
  if (in_len == 0 || out_len == 0) return out;

  // Hann-windowed sinc interpolation. For factor > 1 the read position
  // advances faster than real time, so the kernel is lowpassed to the
  // reduced Nyquist to avoid aliasing.
  const double cutoff = std::min(1.0, 1.0 / factor);
  const int half_taps =
      static_cast<int>(std::ceil(24.0 / cutoff));  // kernel half-width

  for (std::size_t n = 0; n < out_len; ++n) {
    const double t = static_cast<double>(n) * factor;
    const auto center = static_cast<long long>(std::floor(t));
    double acc = 0.0;
    for (long long k = center - half_taps; k <= center + half_taps + 1; ++k) {
      if (k < 0 || k >= static_cast<long long>(in_len)) continue;
      const double u = t - static_cast<double>(k);
      const double win =
          0.5 + 0.5 * std::cos(kPi * u / (half_taps + 1.0));
      acc += buffer.samples[static_cast<std::size_t>(k)] * cutoff *
             sinc(cutoff * u) * win;
    }
    out.samples[n] = acc;
  }
  return out;
}

AudioBuffer drop_chunks(const AudioBuffer& buffer, RngStream& rng,
                        const TdAugmentConfig& config) {
  config.validate();
  AudioBuffer out = buffer;
  const std::size_t len = out.size();
  if (len == 0) return out;

  const double rate = out.sample_rate_hz;
  const auto count =
      static_cast<int>(rng.range(config.chunk_count_min,
                                 config.chunk_count_max));
  std::vector<std::pair<std::size_t, std::size_t>> placed;  // [begin, end)
  for (int c = 0; c < count; ++c) {
    const double ms =
        rng.uniform(config.chunk_len_ms_min, config.chunk_len_ms_max);
    std::size_t chunk =
        static_cast<std::size_t>(std::llround(ms * rate / 1000.0));
    chunk = std::clamp<std::size_t>(chunk, 1, std::max<std::size_t>(len / 2, 1));
    if (chunk >= len) continue;

    // Rejection-sample a start position disjoint from the chunks so far.
    for (int attempt = 0; attempt < 100; ++attempt) {
      const std::size_t start = rng.below(len - chunk + 1);
      const std::size_t end = start + chunk;
      const bool overlaps =
          std::any_of(placed.begin(), placed.end(), [&](const auto& seg) {
            return start < seg.second && seg.first < end;
          });
      if (!overlaps) {
        placed.emplace_back(start, end);
        break;
      }
    }
  }
  for (const auto& [begin, end] : placed)
    std::fill(out.samples.begin() + static_cast<std::ptrdiff_t>(begin),
              out.samples.begin() + static_cast<std::ptrdiff_t>(end), 0.0);
  return out;
}

AudioBuffer apply_notch(const AudioBuffer& buffer, double center_hz,
                        double width_hz) {
  AudioBuffer out = buffer;
  const double rate = out.sample_rate_hz;

  // RBJ cookbook notch with -3 dB bandwidth = width_hz.
  const double w0 = 2.0 * kPi * center_hz / rate;
  const double q = center_hz / width_hz;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  const double b0 = 1.0 / a0;
  const double b1 = -2.0 * std::cos(w0) / a0;
  const double b2 = 1.0 / a0;
  const double a1 = -2.0 * std::cos(w0) / a0;
  const double a2 = (1.0 - alpha) / a0;

  double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
  for (double& s : out.samples) {
    const double x0 = s;
    const double y0 = b0 * x0 + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = x0;
    y2 = y1;
    y1 = y0;
    s = y0;
  }
  return out;
}

AudioBuffer drop_freq_bands(const AudioBuffer& buffer, RngStream& rng,
                            const TdAugmentConfig& config) {
  config.validate();
  AudioBuffer out = buffer;
  if (out.samples.empty()) return out;

  const double nyquist = out.sample_rate_hz / 2.0;
  const auto count = static_cast<int>(
      rng.range(config.band_count_min, config.band_count_max));

  for (int c = 0; c < count; ++c) {
    const double lo = config.band_width_hz;
    const double hi = nyquist - config.band_width_hz;
    if (hi <= lo) break;  // sample rate too low for this band width
    const double f0 = rng.uniform(lo, hi);
    out = apply_notch(out, f0, config.band_width_hz);
  }
  return out;
}

AudioBuffer apply_td_augment(const AudioBuffer& buffer,
                             std::string_view utterance_id,
                             const TdAugmentConfig& config) {
  config.validate();
  RngStream rng = utterance_stream(config.master_seed, utterance_id);

  std::vector<double> factors = config.speed_factors;
  std::sort(factors.begin(), factors.end());
  const double factor = factors[rng.below(factors.size())];

  AudioBuffer out = perturb_speed(buffer, factor);
  out = drop_chunks(out, rng, config);
  out = drop_freq_bands(out, rng, config);
  return out;
}

}  // namespace accentmix
