#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "minuteman/event_bus.hpp"

namespace minuteman::ingest {

inline constexpr int kDefaultChunkLengthWords = 100;
inline constexpr int kMinChunkLengthWords = 10;
inline constexpr int kMaxChunkLengthWords = 2000;

struct SessionInfo {
  std::string session_id;
  std::chrono::system_clock::time_point created_at;
  int chunk_length_words = kDefaultChunkLengthWords;
  std::set<std::string> tracks;
  bool closed = false;
};

/// Throws ValidationError unless `words` lies in the accepted density range.
void validate_chunk_length(int words);

/// Session registry and chunk validation in front of the "audio" topic.
///
/// Chunks are checked in a fixed order (session, payload length, chunk_seq)
/// and a rejected chunk leaves no trace. Accepted chunks are published with
/// key "session:track".
class IngestService {
 public:
  explicit IngestService(std::shared_ptr<EventBus> bus);

  SessionInfo create_session(std::optional<int> chunk_length_words = std::nullopt);

  /// Returns the chunk's enqueue_seq on the "audio" topic.
  std::uint64_t ingest_chunk(const std::string& session_id, const std::string& track_id,
                             std::uint64_t chunk_seq, std::string_view payload);

  void set_chunk_length(const std::string& session_id, int chunk_length_words);

  /// Stops accepting audio and sends an end marker for every track so the
  /// segmenter can flush. Later calls on the session report not-found.
  void close_session(const std::string& session_id);

  /// Display name used instead of the track id in transcript lines.
  void register_speaker(const std::string& session_id, const std::string& track_id,
                        std::string label);

  /// Open sessions only.
  SessionInfo session(const std::string& session_id) const;
  /// Any session ever created, including closed ones.
  std::optional<SessionInfo> find(const std::string& session_id) const;
  int chunk_length_words(const std::string& session_id) const;
  std::string speaker_label(const std::string& session_id, const std::string& track_id) const;

 private:
  struct State {
    SessionInfo info;
    std::map<std::string, std::uint64_t> next_chunk;
    std::map<std::string, std::string> speakers;
  };

  State& open_state(const std::string& session_id);
  const State& any_state(const std::string& session_id) const;

  std::shared_ptr<EventBus> bus_;
  mutable std::mutex mutex_;
  std::map<std::string, State> sessions_;
  std::uint64_t next_session_ = 1;
};

}  // namespace minuteman::ingest
