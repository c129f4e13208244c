#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace minuteman::audio {

inline constexpr int kSampleRate = 16000;
inline constexpr std::size_t kChunkSamples = 16000;
inline constexpr std::size_t kChunkBytes = kChunkSamples * sizeof(std::int16_t);

/// One second of mono s16 PCM from a single track.
struct AudioChunk {
  std::string session_id;
  std::string track_id;
  std::uint64_t chunk_seq = 0;
  std::vector<std::int16_t> samples;

  double stream_time_s() const { return static_cast<double>(chunk_seq); }
};

/// Decodes little-endian s16 PCM. Throws FormatError unless the payload is
/// exactly one chunk long.
std::vector<std::int16_t> decode_chunk_payload(std::string_view payload);

std::string encode_pcm(std::span<const std::int16_t> samples);
std::vector<std::int16_t> decode_pcm(std::string_view bytes);

/// RMS level relative to full scale (32768). Digital silence maps to -inf.
double rms_dbfs(std::span<const std::int16_t> samples);

/// 44-byte RIFF header + data for 16 kHz mono s16.
std::string wav_encode(std::span<const std::int16_t> samples, int sample_rate = kSampleRate);

struct WavData {
  int sample_rate = 0;
  int channels = 0;
  std::vector<std::int16_t> samples;  // interleaved if channels > 1
};

/// Reads a PCM s16 WAV file body. Throws FormatError on anything else.
WavData wav_decode(std::string_view bytes);

}  // namespace minuteman::audio
