#include "accentmix/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

namespace accentmix {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16le(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

AudioBuffer read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();

  if (n < 12) throw CorruptFile(path + ": too short for a RIFF header");
  if (std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0)
    throw UnsupportedFormat(path + ": not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  AudioBuffer buf;

  std::size_t pos = 12;
  bool have_data = false;
  while (pos + 8 <= n) {
    const char* id = bytes.data() + pos;
    const std::uint32_t size = read_u32le(p + pos + 4);
    pos += 8;
    if (size > n - pos)
      throw CorruptFile(path + ": truncated chunk '" + std::string(id, 4) +
                        "'");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) throw CorruptFile(path + ": fmt chunk too small");
      format = read_u16le(p + pos);
      channels = read_u16le(p + pos + 2);
      rate = read_u32le(p + pos + 4);
      bits = read_u16le(p + pos + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) throw CorruptFile(path + ": data chunk before fmt");
      if (format != 1)
        throw UnsupportedFormat(path + ": only PCM (format tag 1) supported");
      if (channels != 1)
        throw UnsupportedFormat(path + ": only mono supported, got " +
                                std::to_string(channels) + " channels");
      if (bits != 16)
        throw UnsupportedFormat(path + ": only 16-bit supported, got " +
                                std::to_string(bits));
      if (rate == 0) throw CorruptFile(path + ": zero sample rate");
      const std::size_t count = size / 2;
      buf.samples.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        const std::int16_t s = static_cast<std::int16_t>(
            read_u16le(p + pos + 2 * i));
        buf.samples[i] = static_cast<double>(s) / 32768.0;
      }
      buf.sample_rate_hz = static_cast<int>(rate);
      have_data = true;
      break;
    }
    pos += size + (size & 1);  // chunks are word-aligned
  }
  if (!have_data) throw CorruptFile(path + ": no data chunk");
  return buf;
}

void write_wav(const AudioBuffer& buffer, const std::string& path) {
  if (buffer.sample_rate_hz <= 0)
    throw IoError(path + ": buffer has no sample rate");
  for (double s : buffer.samples)
    if (!std::isfinite(s))
      throw IoError(path + ": buffer contains non-finite samples");

  const std::uint32_t rate = static_cast<std::uint32_t>(buffer.sample_rate_hz);
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(buffer.samples.size() * 2);

  std::string out;
  out.reserve(44 + data_size);
  out.append("RIFF");
  put_u32le(out, 36 + data_size);
  out.append("WAVE");
  out.append("fmt ");
  put_u32le(out, 16);
  put_u16le(out, 1);  // PCM
  put_u16le(out, 1);  // mono
  put_u32le(out, rate);
  put_u32le(out, rate * 2);
  put_u16le(out, 2);
  put_u16le(out, 16);
  out.append("data");
  put_u32le(out, data_size);

  constexpr double kMax = 1.0 - 1.0 / 32768.0;
  for (double s : buffer.samples) {
    const double c = std::clamp(s, -1.0, kMax);
    const auto q = static_cast<std::int16_t>(std::lrint(c * 32768.0));
    put_u16le(out, static_cast<std::uint16_t>(q));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("short write to " + path);
}

std::vector<double> make_window(WindowKind kind, std::size_t len) {
  std::vector<double> w(len, 1.0);
  if (len == 0) return w;
  switch (kind) {
    case WindowKind::kHamming:
      for (std::size_t i = 0; i < len; ++i)
        w[i] = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(i) /
                                      static_cast<double>(len));
      break;
    case WindowKind::kHann:
      for (std::size_t i = 0; i < len; ++i)
        w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) /
                                    static_cast<double>(len));
      break;
    case WindowKind::kRect:
      break;
  }
  return w;
}

FrameStack frame_signal(const AudioBuffer& buffer, std::size_t frame_len,
                        std::size_t hop, WindowKind window) {
  const std::size_t len = buffer.samples.size();
  if (len == 0) throw InvalidFraming("empty buffer");
  if (hop == 0 || frame_len < hop)
    throw InvalidFraming("need frame_len >= hop >= 1, got frame_len=" +
                         std::to_string(frame_len) +
                         " hop=" + std::to_string(hop));
  if (frame_len > len)
    throw InvalidFraming("frame_len " + std::to_string(frame_len) +
                         " exceeds signal length " + std::to_string(len));

  FrameStack stack;
  stack.frame_len = frame_len;
  stack.hop = hop;
  stack.window = make_window(window, frame_len);
  stack.original_len = len;
  stack.sample_rate_hz = buffer.sample_rate_hz;

  const std::size_t full = 1 + (len - frame_len) / hop;
  const bool tail = (len - frame_len) % hop != 0;
  stack.frames.reserve(full + (tail ? 1 : 0));

  for (std::size_t i = 0; i < full + (tail ? 1 : 0); ++i) {
    const std::size_t start = i * hop;
    std::vector<double> frame(frame_len, 0.0);
    const std::size_t avail = start < len ? std::min(frame_len, len - start)
                                          : 0;
    for (std::size_t k = 0; k < avail; ++k)
      frame[k] = buffer.samples[start + k] * stack.window[k];
    stack.frames.push_back(std::move(frame));
  }
  return stack;
}

AudioBuffer overlap_add(const FrameStack& stack) {
  const std::size_t n_frames = stack.frames.size();
  if (n_frames == 0) throw InvalidFraming("empty frame stack");
  const std::size_t padded =
      (n_frames - 1) * stack.hop + stack.frame_len;

  std::vector<double> acc(padded, 0.0);
  std::vector<double> wsum(padded, 0.0);
  for (std::size_t i = 0; i < n_frames; ++i) {
    const std::size_t start = i * stack.hop;
    const auto& frame = stack.frames[i];
    for (std::size_t k = 0; k < stack.frame_len; ++k) {
      acc[start + k] += frame[k];
      wsum[start + k] += stack.window[k];
    }
  }

  AudioBuffer out;
  out.sample_rate_hz = stack.sample_rate_hz;
  out.samples.resize(stack.original_len);
  constexpr double kEps = 1e-12;
  for (std::size_t i = 0; i < stack.original_len; ++i)
    out.samples[i] = wsum[i] > kEps ? acc[i] / wsum[i] : acc[i];
  return out;
}

double cola_min_coverage(const FrameStack& stack) {
  const std::size_t n_frames = stack.frames.size();
  if (n_frames == 0) return 0.0;
  const std::size_t padded = (n_frames - 1) * stack.hop + stack.frame_len;
  std::vector<double> wsum(padded, 0.0);
  for (std::size_t i = 0; i < n_frames; ++i)
    for (std::size_t k = 0; k < stack.frame_len; ++k)
      wsum[i * stack.hop + k] += stack.window[k];
  double lo = std::numeric_limits<double>::infinity(), mean = 0.0;
  for (std::size_t i = 0; i < stack.original_len; ++i) {
    lo = std::min(lo, wsum[i]);
    mean += wsum[i];
  }
  mean /= static_cast<double>(stack.original_len);
  return mean > 0.0 ? lo / mean : 0.0;
}

}  // namespace accentmix
