#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minuteman/audio.hpp"

namespace minuteman::segmenter {

inline constexpr double kDefaultThresholdDbfs = -40.0;
inline constexpr int kDefaultMaxUtteranceSeconds = 30;

/// Speech span of one track, ready for transcription. `finalize_seq` is 0
/// until the ordering stage releases the utterance.
struct UtteranceAudio {
  std::string session_id;
  std::string track_id;
  std::vector<std::int16_t> audio;
  double start_time_s = 0;
  double end_time_s = 0;
  std::uint64_t finalize_seq = 0;

  std::size_t chunk_count() const { return audio.size() / audio::kChunkSamples; }
};

/// Energy gate: RMS over the whole chunk at or above `threshold_dbfs`.
bool detect_speech(std::span<const std::int16_t> samples,
                   double threshold_dbfs = kDefaultThresholdDbfs);

/// Pluggable per-chunk speech classifier.
class VoiceDetector {
 public:
  virtual ~VoiceDetector() = default;
  virtual bool is_speech(std::span<const std::int16_t> samples) const = 0;
};

class EnergyVad final : public VoiceDetector {
 public:
  explicit EnergyVad(double threshold_dbfs = kDefaultThresholdDbfs)
      : threshold_dbfs_(threshold_dbfs) {}
  bool is_speech(std::span<const std::int16_t> samples) const override {
    return detect_speech(samples, threshold_dbfs_);
  }

 private:
  double threshold_dbfs_;
};

/// Speech buffer of one track. Every buffered chunk was classified as speech.
class TrackBuffer {
 public:
  TrackBuffer(std::string session_id, std::string track_id,
              int max_utterance_s = kDefaultMaxUtteranceSeconds);

  /// Feeds the next chunk of the track. Emits the buffered utterance on the
  /// first silent chunk, or before a speech chunk that would push the buffer
  /// past the forced-flush bound.
  std::optional<UtteranceAudio> advance(const audio::AudioChunk& chunk, bool is_speech);

  /// Emits whatever is buffered (end of session).
  std::optional<UtteranceAudio> flush();

  bool empty() const { return chunk_count_ == 0; }
  std::size_t buffered_chunks() const { return chunk_count_; }
  /// Stream time up to which this track has been consumed.
  std::uint64_t watermark() const { return next_seq_; }
  const std::string& track_id() const { return track_id_; }

 private:
  UtteranceAudio take();

  std::string session_id_;
  std::string track_id_;
  std::size_t max_chunks_;
  std::vector<std::int16_t> samples_;
  std::size_t chunk_count_ = 0;
  std::uint64_t speech_start_seq_ = 0;
  std::uint64_t next_seq_ = 0;
};

/// Sorts utterances by end time, ties by ascending track id, and numbers
/// them from `first_seq` in that order.
std::vector<UtteranceAudio> finalize_order(std::vector<UtteranceAudio> utterances,
                                           std::uint64_t first_seq = 1);

/// Streaming form of finalize_order(). An utterance is released only once no
/// live track can still produce one that sorts before it, so the output is
/// independent of how chunk processing interleaves across tracks.
class FinalizeOrder {
 public:
  void observe(const TrackBuffer& track);
  void add(UtteranceAudio utterance);
  void end_track(const std::string& track_id);
  std::vector<UtteranceAudio> release();
  std::vector<UtteranceAudio> release_all();
  std::uint64_t last_assigned() const { return next_seq_ - 1; }
  std::size_t held() const { return held_.size(); }

 private:
  struct Bound {
    std::uint64_t earliest_end = 0;
    bool ended = false;
  };
  bool releasable(const UtteranceAudio& u) const;
  UtteranceAudio stamp(UtteranceAudio u);

  std::map<std::string, Bound> bounds_;
  std::vector<UtteranceAudio> held_;  // kept sorted by (end, track)
  std::uint64_t next_seq_ = 1;
};

/// Per-session segmentation: one TrackBuffer per track plus the serialized
/// ordering stage.
class SessionSegmenter {
 public:
  SessionSegmenter(std::string session_id, std::shared_ptr<const VoiceDetector> vad,
                   int max_utterance_s = kDefaultMaxUtteranceSeconds);

  /// Throws SequencingError if the chunk does not follow the previous one.
  std::vector<UtteranceAudio> process(const audio::AudioChunk& chunk);
  std::vector<UtteranceAudio> end_track(const std::string& track_id);
  std::vector<UtteranceAudio> finish();

  std::uint64_t last_finalize_seq() const { return order_.last_assigned(); }

 private:
  TrackBuffer& buffer_for(const std::string& track_id);

  std::string session_id_;
  std::shared_ptr<const VoiceDetector> vad_;
  int max_utterance_s_;
  std::map<std::string, TrackBuffer> tracks_;
  FinalizeOrder order_;
};

}  // namespace minuteman::segmenter
