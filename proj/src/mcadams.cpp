#include "accentmix/mcadams.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <thread>

#include "accentmix/util.hpp"

namespace accentmix {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void McAdamsConfig::validate() const {
  if (!(alpha >= 0.5 && alpha <= 1.5))
    throw Error("alpha " + std::to_string(alpha) +
                " outside the supported range [0.5, 1.5]");
  if (!(angle_floor > 0.0 && angle_floor < kPi / 2.0))
    throw Error("angle_floor must be in (0, pi/2)");
  if (!(hop_ms > 0.0) || frame_ms < hop_ms)
    throw Error("need frame_ms >= hop_ms > 0");
  if (lpc_order < 0) throw Error("negative lpc_order");
}

PoleSet transform_poles(const PoleSet& poles, double alpha,
                        double angle_floor) {
  if (alpha == 1.0) return poles;  // exact identity
  const double hi = kPi - angle_floor;
  PoleSet out;
  out.poles.reserve(poles.poles.size());
  for (const Pole& p : poles.poles) {
    Pole q = p;  // radius copied bit-exactly
    const double mag = std::abs(p.angle);
    if (mag > angle_floor && mag < hi) {
      const double moved = std::clamp(std::pow(mag, alpha), angle_floor, hi);
      q.angle = std::copysign(moved, p.angle);
    }
    out.poles.push_back(q);
  }
  return out;
}

AudioBuffer mcadams_transform(const AudioBuffer& buffer,
                              const McAdamsConfig& config,
                              TransformStats* stats) {
  config.validate();
  if (buffer.samples.empty()) throw InvalidFraming("empty buffer");
  if (buffer.sample_rate_hz <= 0) throw Error("buffer has no sample rate");

  const double rate = buffer.sample_rate_hz;
  const std::size_t len = buffer.size();
  std::size_t frame_len = static_cast<std::size_t>(
      std::lround(config.frame_ms * rate / 1000.0));
  std::size_t hop =
      static_cast<std::size_t>(std::lround(config.hop_ms * rate / 1000.0));
  frame_len = std::clamp<std::size_t>(frame_len, 1, len);
  hop = std::clamp<std::size_t>(hop, 1, frame_len);

  int order = config.lpc_order > 0 ? config.lpc_order
                                   : buffer.sample_rate_hz / 1000 + 4;
  order = std::min<int>(order, static_cast<int>(frame_len) - 1);
  order = std::max(order, 1);

  FrameStack stack = frame_signal(buffer, frame_len, hop, config.window);

  TransformStats st;
  FilterState state(order);
  for (auto& frame : stack.frames) {
    ++st.frames;
    const std::vector<double> r = autocorrelate(frame, order);
    if (r[0] <= kEnergyEps) {
      ++st.degenerate_frames;  // silent frame passes through untouched
      state.reset();
      continue;
    }
    try {
      const LpcModel model = levinson_durbin(r, order);
      const PoleSet poles = lpc_to_poles(model);
      const PoleSet moved =
          transform_poles(poles, config.alpha, config.angle_floor);
      const LpcModel target = poles_to_lpc(moved);
      const std::vector<double> residual = inverse_filter(frame, model);
      if (!config.carry_filter_state) state.reset();
      frame = synthesis_filter(residual, target, state);
    } catch (const RootFindingDiverged&) {
      ++st.fallback_frames;
      state.reset();
    } catch (const UnstableFilter&) {
      ++st.fallback_frames;
      state.reset();
    } catch (const ConjugateMismatch&) {
      ++st.fallback_frames;
      state.reset();
    }
  }

  AudioBuffer out = overlap_add(stack);

  double peak = 0.0;
  for (double s : out.samples) peak = std::max(peak, std::abs(s));
  if (peak > 1.0) {
    const double g = 1.0 / peak;
    for (double& s : out.samples) s *= g;
  }

  if (stats) *stats += st;
  return out;
}

std::string alpha_suffix(double alpha) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "__mcadams%.2f", alpha);
  return buf;
}

namespace {

namespace fs = std::filesystem;

std::string suffixed_path(const std::string& audio_path, double alpha) {
  const fs::path p(audio_path);
  fs::path out = p.parent_path() / (p.stem().string() + alpha_suffix(alpha) +
                                    ".wav");
  return out.generic_string();
}

std::vector<double> checked_alphas(std::vector<double> alphas) {
  if (alphas.empty()) throw Error("alphas must be non-empty");
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
  std::set<std::string> suffixes;
  for (double a : alphas) {
    if (!(a >= 0.5 && a <= 1.5))
      throw Error("alpha " + std::to_string(a) +
                  " outside the supported range [0.5, 1.5]");
    if (!suffixes.insert(alpha_suffix(a)).second)
      throw Error("alphas collide at two decimals: " + alpha_suffix(a));
  }
  return alphas;
}

}  // namespace

Manifest augment_plan(const Manifest& manifest,
                      const std::vector<double>& alphas,
                      const std::string& /*out_dir*/) {
  const std::vector<double> as = checked_alphas(alphas);
  Manifest out;
  out.records.reserve(manifest.records.size() * as.size());
  for (const auto& r : manifest.records) {
    for (double a : as) {
      UtteranceRecord n = r;
      n.id = r.id + alpha_suffix(a);
      n.audio_path = suffixed_path(r.audio_path, a);
      n.alpha = a;
      out.records.push_back(std::move(n));
    }
  }
  return out;
}

AugmentResult augment_corpus(const Manifest& manifest,
                             const std::vector<double>& alphas,
                             const std::string& audio_root,
                             const std::string& out_dir,
                             const McAdamsConfig& config, int jobs) {
  const std::vector<double> as = checked_alphas(alphas);
  config.validate();

  // Pre-create output directories so workers never race on mkdir.
  std::set<fs::path> dirs;
  for (const auto& r : manifest.records)
    dirs.insert(fs::path(out_dir) / fs::path(r.audio_path).parent_path());
  for (const auto& d : dirs) fs::create_directories(d);

  struct PerRecord {
    std::vector<UtteranceRecord> records;
    std::string failure;  // empty = ok
    TransformStats stats;
  };
  std::vector<PerRecord> results(manifest.records.size());

  auto process = [&](std::size_t idx) {
    const UtteranceRecord& r = manifest.records[idx];
    PerRecord& res = results[idx];
    const fs::path src = fs::path(audio_root) / r.audio_path;
    try {
      AudioBuffer audio;
      std::string raw_bytes;
      bool need_audio = false, need_bytes = false;
      for (double a : as) (a == 1.0 ? need_bytes : need_audio) = true;
      if (need_audio) audio = read_wav(src.string());
      if (need_bytes) raw_bytes = read_file(src.string());

      for (double a : as) {
        UtteranceRecord n = r;
        n.id = r.id + alpha_suffix(a);
        n.audio_path = suffixed_path(r.audio_path, a);
        n.alpha = a;
        const fs::path dst = fs::path(out_dir) / n.audio_path;
        if (a == 1.0) {
          write_file(dst.string(), raw_bytes);  // bit-copy of the source
        } else {
          McAdamsConfig c = config;
          c.alpha = a;
          AudioBuffer transformed = mcadams_transform(audio, c, &res.stats);
          write_wav(transformed, dst.string());
        }
        res.records.push_back(std::move(n));
      }
    } catch (const Error& e) {
      res.records.clear();
      res.failure = r.id + std::string(": ") + e.what();
    }
  };

  int workers = jobs > 0 ? jobs
                         : static_cast<int>(std::max(
                               1u, std::thread::hardware_concurrency()));
  workers = std::min<int>(workers,
                          std::max<int>(1, static_cast<int>(
                                               manifest.records.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < manifest.records.size(); ++i) process(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < manifest.records.size();
             i = next.fetch_add(1))
          process(i);
      });
    for (auto& t : pool) t.join();
  }

  AugmentResult out;
  for (auto& res : results) {
    if (!res.failure.empty()) {
      out.failed_ids.push_back(res.failure);
      continue;
    }
    for (auto& rec : res.records) out.manifest.records.push_back(std::move(rec));
    out.stats += res.stats;
  }
  return out;
}

}  // namespace accentmix
