#include "minuteman/audio.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "minuteman/errors.hpp"

namespace minuteman::audio {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

std::uint32_t get_u32(std::string_view s, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[at + i]);
  return v;
}

std::uint16_t get_u16(std::string_view s, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(s[at]) |
                                    (static_cast<unsigned char>(s[at + 1]) << 8));
}

}  // namespace

std::vector<std::int16_t> decode_pcm(std::string_view bytes) {
  if (bytes.size() % 2 != 0) throw FormatError("PCM byte count must be even");
  std::vector<std::int16_t> samples(bytes.size() / 2);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i] = static_cast<std::int16_t>(get_u16(bytes, 2 * i));
  }
  return samples;
}

std::vector<std::int16_t> decode_chunk_payload(std::string_view payload) {
  if (payload.size() != kChunkBytes) {
    throw FormatError("audio chunk must be exactly " + std::to_string(kChunkBytes) +
                      " bytes, got " + std::to_string(payload.size()));
  }
  return decode_pcm(payload);
}

std::string encode_pcm(std::span<const std::int16_t> samples) {
  std::string out;
  out.reserve(samples.size() * 2);
  for (auto s : samples) put_u16(out, static_cast<std::uint16_t>(s));
  return out;
}

double rms_dbfs(std::span<const std::int16_t> samples) {
  if (samples.empty()) return -std::numeric_limits<double>::infinity();
  long double sum = 0;
  for (auto s : samples) sum += static_cast<long double>(s) * s;
  double rms = std::sqrt(static_cast<double>(sum / samples.size())) / 32768.0;
  if (rms <= 0.0) return -std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(rms);
}

std::string wav_encode(std::span<const std::int16_t> samples, int sample_rate) {
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(sample_rate));
  put_u32(out, static_cast<std::uint32_t>(sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_bytes);
  out += encode_pcm(samples);
  return out;
}

WavData wav_decode(std::string_view bytes) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" || bytes.substr(8, 4) != "WAVE") {
    throw FormatError("not a RIFF/WAVE file");
  }
  WavData wav;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    auto id = bytes.substr(pos, 4);
    std::size_t size = get_u32(bytes, pos + 4);
    std::size_t body = pos + 8;
    if (body + size > bytes.size()) size = bytes.size() - body;
    if (id == "fmt ") {
      if (size < 16) throw FormatError("short fmt chunk");
      if (get_u16(bytes, body) != 1) throw FormatError("only PCM WAV is supported");
      wav.channels = get_u16(bytes, body + 2);
      wav.sample_rate = static_cast<int>(get_u32(bytes, body + 4));
      if (get_u16(bytes, body + 14) != 16) throw FormatError("only 16-bit WAV is supported");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw FormatError("data chunk before fmt chunk");
      wav.samples = decode_pcm(bytes.substr(body, size & ~std::size_t{1}));
      return wav;
    }
    pos = body + size + (size & 1);
  }
  throw FormatError("WAV file has no data chunk");
}

}  // namespace minuteman::audio
