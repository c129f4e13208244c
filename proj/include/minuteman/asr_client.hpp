#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minuteman/retry.hpp"
#include "minuteman/segmenter.hpp"

namespace minuteman::asr {

inline constexpr const char* kFailedSentinel = "[transcription failed]";

/// A transcribed speech span; one transcript line.
struct Utterance {
  std::uint64_t utt_seq = 0;
  std::string track_id;
  std::string speaker_label;
  std::string text;
  double start_time_s = 0;
  double end_time_s = 0;
};

class AsrBackend {
 public:
  virtual ~AsrBackend() = default;
  /// Raw backend call. May throw on transport or service failure.
  virtual std::string transcribe(const segmenter::UtteranceAudio& audio) = 0;
};

/// Lowercase hex SHA-256 of the little-endian PCM bytes.
std::string content_hash(std::span<const std::int16_t> samples);

/// Deterministic test double: looks the audio hash up in a fixture manifest.
class MockAsr final : public AsrBackend {
 public:
  MockAsr() = default;
  explicit MockAsr(std::map<std::string, std::string> manifest)
      : manifest_(std::move(manifest)) {}

  /// Reads a JSON object mapping content hashes to transcripts.
  static MockAsr from_file(const std::string& path);

  std::string transcribe(const segmenter::UtteranceAudio& audio) override;

 private:
  std::map<std::string, std::string> manifest_;
};

/// POST {base}/transcribe with a WAV body, plain-text response.
class HttpAsr final : public AsrBackend {
 public:
  explicit HttpAsr(std::string base_url,
                   std::chrono::milliseconds timeout = std::chrono::seconds(60));
  std::string transcribe(const segmenter::UtteranceAudio& audio) override;

 private:
  std::string base_url_;
  std::chrono::milliseconds timeout_;
};

/// "mock:" / "mock:<manifest-path>" selects MockAsr, anything else is an
/// HTTP base URL.
std::shared_ptr<AsrBackend> make_backend(const std::string& asr_url);

/// Newlines become spaces, then the result is trimmed.
std::string normalize_transcript(std::string_view raw);

/// Backend call with retries; normalizes the text and falls back to the
/// failure sentinel so the timeline keeps its line.
class Transcriber {
 public:
  explicit Transcriber(std::shared_ptr<AsrBackend> backend, RetryPolicy policy = {},
                       Sleeper sleep = real_sleep);

  std::string transcribe(const segmenter::UtteranceAudio& audio);

 private:
  std::shared_ptr<AsrBackend> backend_;
  RetryPolicy policy_;
  Sleeper sleep_;
};

/// Hold-back buffer restoring utt_seq order before utterances are appended.
/// Discarded (empty) transcriptions still occupy their slot so later
/// utterances are not blocked.
class Resequencer {
 public:
  struct Slot {
    std::uint64_t utt_seq = 0;
    std::optional<Utterance> utterance;  // nullopt: discarded
  };

  /// Returns every slot that became ready, in order. Duplicates and already
  /// released sequence numbers are ignored.
  std::vector<Slot> offer(std::uint64_t utt_seq, std::optional<Utterance> utterance);

  std::uint64_t next_expected() const { return next_; }
  std::size_t held() const { return held_.size(); }

 private:
  std::uint64_t next_ = 1;
  std::map<std::uint64_t, std::optional<Utterance>> held_;
};

}  // namespace minuteman::asr
