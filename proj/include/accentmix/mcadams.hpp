#ifndef ACCENTMIX_MCADAMS_HPP
#define ACCENTMIX_MCADAMS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "accentmix/audio.hpp"
#include "accentmix/lpc.hpp"
#include "accentmix/manifest.hpp"

namespace accentmix {

// Parameters of the McAdams pseudo-voice transformation. alpha is the
// exponent applied to pole angles; alpha = 1 leaves the signal unchanged.
struct McAdamsConfig {
  double alpha = 1.0;
  int lpc_order = 0;        // 0 = sample_rate_hz/1000 + 4
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  double angle_floor = 0.02;  // poles this close to the real axis stay put
  WindowKind window = WindowKind::kHamming;
  // Synthesis-filter memory carried across frames of one utterance. Off by
  // default: per-frame zero state makes analysis/resynthesis an exact
  // inverse, which the alpha = 1 identity depends on.
  bool carry_filter_state = false;

  void validate() const;
};

// Raises every pole angle in (angle_floor, pi - angle_floor) to the power
// alpha, clamped back into that band. Radii are copied untouched and
// conjugate partners mirror each other exactly. alpha = 1 returns the input
// unchanged.
PoleSet transform_poles(const PoleSet& poles, double alpha,
                        double angle_floor);

struct TransformStats {
  std::size_t frames = 0;
  std::size_t degenerate_frames = 0;  // silent, passed through
  std::size_t fallback_frames = 0;    // root finding or stability fallback

  TransformStats& operator+=(const TransformStats& o) {
    frames += o.frames;
    degenerate_frames += o.degenerate_frames;
    fallback_frames += o.fallback_frames;
    return *this;
  }
};

// Frame -> LPC -> residual -> pole transform -> resynthesis -> overlap-add.
// Output has the same length and sample rate as the input; the result is
// uniformly rescaled only if a sample exceeds 1 in magnitude.
AudioBuffer mcadams_transform(const AudioBuffer& buffer,
                              const McAdamsConfig& config,
                              TransformStats* stats = nullptr);

// Manifest-level plan of an augmentation run: |alphas| x N records, input
// order, alphas ascending within each source record. Ids and file names get
// a deterministic "__mcadams<alpha>" suffix with two decimals.
Manifest augment_plan(const Manifest& manifest,
                      const std::vector<double>& alphas,
                      const std::string& out_dir);

struct AugmentResult {
  Manifest manifest;
  std::vector<std::string> failed_ids;  // source records whose audio failed
  TransformStats stats;
};

// Renders the plan: alpha = 1 records are byte-copies of the source file,
// the rest go through mcadams_transform. Per-file I/O errors are collected,
// the affected records dropped from the output manifest. Utterances are
// processed in parallel (jobs threads); the merge preserves input order so
// output is independent of parallelism.
AugmentResult augment_corpus(const Manifest& manifest,
                             const std::vector<double>& alphas,
                             const std::string& audio_root,
                             const std::string& out_dir,
                             const McAdamsConfig& config, int jobs = 1);

std::string alpha_suffix(double alpha);  // "__mcadams0.70" style

}  // namespace accentmix

#endif  // ACCENTMIX_MCADAMS_HPP
