#ifndef ACCENTMIX_AUGMENT_TD_HPP
#define ACCENTMIX_AUGMENT_TD_HPP

#include <cstdint>
#include <string_view>
#include <vector>

#include "accentmix/audio.hpp"
#include "accentmix/rng.hpp"

namespace accentmix {

// Time-domain SpecAugment approximation: speed perturbation plus random
// zeroed chunks and notched frequency bands, all waveform-side.
struct TdAugmentConfig {
  std::vector<double> speed_factors{0.95, 1.0, 1.05};
  int chunk_count_min = 1;
  int chunk_count_max = 5;
  double chunk_len_ms_min = 50.0;
  double chunk_len_ms_max = 100.0;
  int band_count_min = 1;
  int band_count_max = 3;
  double band_width_hz = 100.0;
  std::uint64_t master_seed = 42;

  void validate() const;
};

// Resamples so output length = round(len / factor); playback at the original
// rate shifts all frequencies by the factor. factor = 1 is an exact copy.
// Throws InvalidFactor outside [0.5, 2.0].
AudioBuffer perturb_speed(const AudioBuffer& buffer, double factor);

// Zeroes k ~ U[chunk_count_min, chunk_count_max] disjoint segments with
// lengths uniform in the configured millisecond range. Length is unchanged.
AudioBuffer drop_chunks(const AudioBuffer& buffer, RngStream& rng,
                        const TdAugmentConfig& config);

// Applies k ~ U[band_count_min, band_count_max] second-order IIR notches
// with centers uniform in (band_width, nyquist - band_width). Length is
// unchanged and the filters are passive.
AudioBuffer drop_freq_bands(const AudioBuffer& buffer, RngStream& rng,
                            const TdAugmentConfig& config);

// One RBJ notch biquad with -3 dB bandwidth width_hz, applied forward.
AudioBuffer apply_notch(const AudioBuffer& buffer, double center_hz,
                        double width_hz);

// speed -> drop_chunks -> drop_freq_bands, driven by an RNG stream seeded
// from (master_seed, utterance_id). A fixed pair reproduces the exact same
// output; distinct utterance ids draw independently.
AudioBuffer apply_td_augment(const AudioBuffer& buffer,
                             std::string_view utterance_id,
                             const TdAugmentConfig& config);

}  // namespace accentmix

#endif  // ACCENTMIX_AUGMENT_TD_HPP
