#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "accentmix/mcadams.hpp"
#include "accentmix/util.hpp"
#include "helpers.hpp"

using namespace accentmix;
using testutil::TempDir;

namespace {

constexpr double kPi = 3.14159265358979323846;

PoleSet random_closed_poleset(RngStream& rng, int max_pairs) {
  PoleSet set;
  const int pairs = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_pairs)));
  for (int i = 0; i < pairs; ++i) {
    Pole p;
    p.radius = rng.uniform(0.2, 0.99);
    p.angle = rng.uniform(0.03, kPi - 0.03);
    set.poles.push_back(p);
    Pole q = p;
    q.angle = -p.angle;
    set.poles.push_back(q);
  }
  if (rng.uniform() < 0.3) set.poles.push_back({rng.uniform(0.1, 0.9), 0.0});
  return set;
}

}  // namespace

TEST_CASE("transform_poles with alpha = 1 is the exact identity") {
  RngStream rng(60);
  for (int trial = 0; trial < 50; ++trial) {
    const PoleSet set = random_closed_poleset(rng, 10);
    const PoleSet out = transform_poles(set, 1.0, 0.02);
    REQUIRE(out.poles.size() == set.poles.size());
    for (std::size_t i = 0; i < set.poles.size(); ++i) {
      REQUIRE(out.poles[i].radius == set.poles[i].radius);
      REQUIRE(out.poles[i].angle == set.poles[i].angle);
    }
  }
}

TEST_CASE("one radian is a fixed point for every alpha") {
  for (double alpha : {0.7, 0.8, 0.9, 1.1, 1.3}) {
    PoleSet set;
    set.poles.push_back({0.9, 1.0});
    set.poles.push_back({0.9, -1.0});
    const PoleSet out = transform_poles(set, alpha, 0.02);
    CHECK(out.poles[0].angle == 1.0);
    CHECK(out.poles[1].angle == -1.0);
  }
}

TEST_CASE("pi/4 at alpha 0.8 moves to (pi/4)^0.8") {
  // Frozen from the scalar oracle: pow(pi/4, 0.8) = 0.8242745768752608.
  PoleSet set;
  set.poles.push_back({0.7, kPi / 4.0});
  set.poles.push_back({0.7, -kPi / 4.0});
  const PoleSet out = transform_poles(set, 0.8, 0.02);
  CHECK(std::abs(out.poles[0].angle - 0.8242745768752608) < 1e-6);
  CHECK(std::abs(out.poles[0].angle - std::pow(kPi / 4.0, 0.8)) < 1e-12);
  CHECK(out.poles[1].angle == -out.poles[0].angle);
  CHECK(out.poles[0].radius == 0.7);
}

TEST_CASE("radii are copied bit-exactly and closure is preserved") {
  RngStream rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    const PoleSet set = random_closed_poleset(rng, 12);
    for (double alpha : {0.7, 0.8, 0.9}) {
      const PoleSet out = transform_poles(set, alpha, 0.02);
      REQUIRE(conjugate_closed(out));
      for (std::size_t i = 0; i < set.poles.size(); ++i)
        REQUIRE(out.poles[i].radius == set.poles[i].radius);
    }
  }
}

TEST_CASE("angles pull toward one radian for alpha < 1 and away for alpha > 1") {
  RngStream rng(62);
  const double floor = 0.02;
  for (int trial = 0; trial < 500; ++trial) {
    const double angle = rng.uniform(floor + 1e-6, kPi - floor - 1e-6);
    PoleSet set;
    set.poles.push_back({0.8, angle});
    set.poles.push_back({0.8, -angle});

    for (double alpha : {0.7, 0.8, 0.9}) {
      const double moved = transform_poles(set, alpha, floor).poles[0].angle;
      if (angle < 1.0 && angle > floor)
        REQUIRE(moved > angle);
      else if (angle > 1.0)
        REQUIRE(moved < angle);
    }
    for (double alpha : {1.1, 1.4}) {
      const double moved = transform_poles(set, alpha, floor).poles[0].angle;
      if (angle < 1.0 && angle > floor)
        REQUIRE(moved < angle);
      else if (angle > 1.0)
        REQUIRE(moved > angle);
    }
  }
}

TEST_CASE("angles outside the floor band are left alone; moved angles clamp") {
  const double floor = 0.02;

  PoleSet near_real;
  near_real.poles.push_back({0.9, 0.01});   // below the floor
  near_real.poles.push_back({0.9, -0.01});
  const PoleSet kept = transform_poles(near_real, 0.7, floor);
  CHECK(kept.poles[0].angle == 0.01);

  // 0.021^1.5 = 0.003..., clamps up to the floor.
  PoleSet low;
  low.poles.push_back({0.9, 0.021});
  low.poles.push_back({0.9, -0.021});
  const PoleSet clamped = transform_poles(low, 1.5, floor);
  CHECK(clamped.poles[0].angle == floor);

  // 3.11^1.5 = 5.48..., clamps down to pi - floor.
  PoleSet high;
  high.poles.push_back({0.9, 3.11});
  high.poles.push_back({0.9, -3.11});
  const PoleSet clamped_hi = transform_poles(high, 1.5, floor);
  CHECK(clamped_hi.poles[0].angle == kPi - floor);
}

TEST_CASE("mcadams_transform keeps silence silent") {
  AudioBuffer buf;
  buf.sample_rate_hz = 16000;
  buf.samples.assign(16000, 0.0);
  McAdamsConfig cfg;
  cfg.alpha = 0.8;
  TransformStats stats;
  const AudioBuffer out = mcadams_transform(buf, cfg, &stats);
  REQUIRE(out.samples.size() == buf.samples.size());
  for (double s : out.samples) REQUIRE(s == 0.0);
  CHECK(stats.degenerate_frames == stats.frames);
}

TEST_CASE("mcadams_transform with alpha = 1 reconstructs above 40 dB SNR") {
  RngStream rng(63);
  for (int trial = 0; trial < 3; ++trial) {
    const AudioBuffer buf = testutil::speech_like(rng, 48000);
    McAdamsConfig cfg;
    cfg.alpha = 1.0;
    const AudioBuffer out = mcadams_transform(buf, cfg);
    REQUIRE(out.samples.size() == buf.samples.size());
    CHECK(testutil::snr_db(buf.samples, out.samples) >= 40.0);
  }
}

TEST_CASE("mcadams_transform preserves length and rate for transforming alphas") {
  RngStream rng(64);
  for (double alpha : {0.7, 0.8, 0.9}) {
    const std::size_t n = 8000 + rng.below(40000);
    const AudioBuffer buf = testutil::speech_like(rng, n);
    McAdamsConfig cfg;
    cfg.alpha = alpha;
    const AudioBuffer out = mcadams_transform(buf, cfg);
    REQUIRE(out.samples.size() == n);
    REQUIRE(out.sample_rate_hz == buf.sample_rate_hz);
    for (double s : out.samples) REQUIRE(std::abs(s) <= 1.0);
  }
}

TEST_CASE("mcadams_transform is deterministic") {
  RngStream rng(65);
  const AudioBuffer buf = testutil::speech_like(rng, 24000);
  McAdamsConfig cfg;
  cfg.alpha = 0.8;
  const AudioBuffer a = mcadams_transform(buf, cfg);
  const AudioBuffer b = mcadams_transform(buf, cfg);
  REQUIRE(a.samples == b.samples);

  TempDir dir("mc_det");
  write_wav(a, dir.str("a.wav"));
  write_wav(b, dir.str("b.wav"));
  CHECK(read_file(dir.str("a.wav")) == read_file(dir.str("b.wav")));
}

TEST_CASE("augment_plan multiplies records by the alpha count") {
  Manifest m;
  for (int i = 0; i < 3; ++i) {
    UtteranceRecord r;
    r.id = "utt" + std::to_string(i);
    r.audio_path = "clips/utt" + std::to_string(i) + ".wav";
    r.duration_s = 2.0 + i;
    r.transcript = "bonjour";
    r.speaker_id = "spk" + std::to_string(i % 2);
    r.corpus = "AAF";
    r.accent = "African";
    m.records.push_back(r);
  }

  const Manifest plan = augment_plan(m, {1.0, 0.7}, "out");
  REQUIRE(plan.records.size() == 6);
  CHECK(plan.records[0].id == "utt0__mcadams0.70");
  CHECK(plan.records[1].id == "utt0__mcadams1.00");
  CHECK(plan.records[0].audio_path == "clips/utt0__mcadams0.70.wav");
  CHECK(plan.records[0].alpha == 0.7);
  CHECK(plan.records[0].transcript == "bonjour");
  CHECK(plan.records[0].speaker_id == "spk0");
  CHECK(plan.total_duration_s() == doctest::Approx(2.0 * m.total_duration_s()));
}

TEST_CASE("augment_corpus renders copies for alpha 1 and transforms otherwise") {
  TempDir dir("mc_corpus");
  std::filesystem::create_directories(dir.str("src/clips"));
  RngStream rng(66);

  Manifest m;
  for (int i = 0; i < 3; ++i) {
    const AudioBuffer buf = testutil::speech_like(rng, 16000);
    UtteranceRecord r;
    r.id = "u" + std::to_string(i);
    r.audio_path = "clips/u" + std::to_string(i) + ".wav";
    r.duration_s = buf.duration_s();
    r.transcript = "salut";
    r.speaker_id = "s" + std::to_string(i);
    r.corpus = "AAF";
    r.accent = "African";
    write_wav(buf, dir.str("src/" + r.audio_path));
    m.records.push_back(r);
  }

  McAdamsConfig cfg;
  const AugmentResult res =
      augment_corpus(m, {0.7, 1.0}, dir.str("src"), dir.str("out"), cfg, 2);
  CHECK(res.failed_ids.empty());
  REQUIRE(res.manifest.records.size() == 6);

  for (const auto& r : res.manifest.records) {
    const std::string path = dir.str("out/" + r.audio_path);
    REQUIRE(std::filesystem::exists(path));
    if (r.alpha == 1.0) {
      const std::string src_rel = r.audio_path;
      const std::string orig =
          src_rel.substr(0, src_rel.find("__mcadams")) + ".wav";
      CHECK(read_file(path) == read_file(dir.str("src/" + orig)));
    } else {
      const AudioBuffer out = read_wav(path);
      CHECK(out.duration_s() == doctest::Approx(r.duration_s));
    }
  }
}

TEST_CASE("augment_corpus collects per-file failures") {
  TempDir dir("mc_fail");
  std::filesystem::create_directories(dir.str("src"));
  RngStream rng(67);

  Manifest m;
  const AudioBuffer buf = testutil::speech_like(rng, 8000);
  UtteranceRecord ok;
  ok.id = "good";
  ok.audio_path = "good.wav";
  ok.duration_s = buf.duration_s();
  ok.transcript = "x";
  ok.speaker_id = "a";
  ok.corpus = "AAF";
  ok.accent = "African";
  write_wav(buf, dir.str("src/good.wav"));
  m.records.push_back(ok);

  UtteranceRecord missing = ok;
  missing.id = "missing";
  missing.audio_path = "missing.wav";
  m.records.push_back(missing);

  const AugmentResult res =
      augment_corpus(m, {0.9, 1.0}, dir.str("src"), dir.str("out"),
                     McAdamsConfig{}, 1);
  REQUIRE(res.failed_ids.size() == 1);
  CHECK(res.failed_ids[0].find("missing") == 0);
  CHECK(res.manifest.records.size() == 2);  // only the good record's alphas
}

TEST_CASE("augment output is independent of the worker count") {
  TempDir dir("mc_jobs");
  std::filesystem::create_directories(dir.str("src"));
  RngStream rng(68);

  Manifest m;
  for (int i = 0; i < 4; ++i) {
    const AudioBuffer buf = testutil::speech_like(rng, 12000);
    UtteranceRecord r;
    r.id = "j" + std::to_string(i);
    r.audio_path = "j" + std::to_string(i) + ".wav";
    r.duration_s = buf.duration_s();
    r.transcript = "y";
    r.speaker_id = "s";
    r.corpus = "AAF";
    r.accent = "African";
    write_wav(buf, dir.str("src/" + r.audio_path));
    m.records.push_back(r);
  }

  const auto seq = augment_corpus(m, {0.8, 1.0}, dir.str("src"),
                                  dir.str("out1"), McAdamsConfig{}, 1);
  const auto par = augment_corpus(m, {0.8, 1.0}, dir.str("src"),
                                  dir.str("out2"), McAdamsConfig{}, 4);
  REQUIRE(seq.manifest.records.size() == par.manifest.records.size());
  for (std::size_t i = 0; i < seq.manifest.records.size(); ++i) {
    const auto& a = seq.manifest.records[i];
    const auto& b = par.manifest.records[i];
    REQUIRE(a.id == b.id);
    CHECK(read_file(dir.str("out1/" + a.audio_path)) ==
          read_file(dir.str("out2/" + b.audio_path)));
  }
}
