#include "minuteman/audio_ingest.hpp"

#include <vector>

#include "minuteman/errors.hpp"
#include "minuteman/wire.hpp"

namespace minuteman::ingest {

void validate_chunk_length(int words) {
  if (words < kMinChunkLengthWords || words > kMaxChunkLengthWords) {
    throw ValidationError("chunk_length_words must be in [" +
                          std::to_string(kMinChunkLengthWords) + ", " +
                          std::to_string(kMaxChunkLengthWords) + "], got " +
                          std::to_string(words));
  }
}

IngestService::IngestService(std::shared_ptr<EventBus> bus) : bus_(std::move(bus)) {}

IngestService::State& IngestService::open_state(const std::string& session_id) {
  auto it = sessions_.find(session_id);
  if (it == sessions_.end() || it->second.info.closed) {
    throw NotFoundError("no open session " + session_id);
  }
  return it->second;
}

const IngestService::State& IngestService::any_state(const std::string& session_id) const {
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw NotFoundError("no session " + session_id);
  return it->second;
}

SessionInfo IngestService::create_session(std::optional<int> chunk_length_words) {
  const int words = chunk_length_words.value_or(kDefaultChunkLengthWords);
  validate_chunk_length(words);
  std::lock_guard lock(mutex_);
  State state;
  state.info.session_id = "s" + std::to_string(next_session_++);
  state.info.created_at = std::chrono::system_clock::now();
  state.info.chunk_length_words = words;
  auto info = state.info;
  sessions_.emplace(info.session_id, std::move(state));
  return info;
}

std::uint64_t IngestService::ingest_chunk(const std::string& session_id,
                                          const std::string& track_id, std::uint64_t chunk_seq,
                                          std::string_view payload) {
  std::unique_lock lock(mutex_);
  auto& state = open_state(session_id);
  if (track_id.empty()) throw ValidationError("track id must not be empty");

  audio::AudioChunk chunk;
  chunk.session_id = session_id;
  chunk.track_id = track_id;
  chunk.chunk_seq = chunk_seq;
  chunk.samples = audio::decode_chunk_payload(payload);

  auto next = state.next_chunk.find(track_id);
  const std::uint64_t expected = next == state.next_chunk.end() ? 0 : next->second;
  if (chunk_seq != expected) {
    throw SequencingError("track " + track_id + " expects chunk " + std::to_string(expected) +
                          ", got " + std::to_string(chunk_seq));
  }
  // Publishing under the lock keeps bus order equal to acceptance order per
  // track; it may block on backpressure.
  auto seq = bus_->publish(wire::topics::kAudio, wire::track_key(session_id, track_id),
                           wire::encode(chunk));
  state.next_chunk[track_id] = expected + 1;
  state.info.tracks.insert(track_id);
  return seq;
}

void IngestService::set_chunk_length(const std::string& session_id, int chunk_length_words) {
  std::lock_guard lock(mutex_);
  auto& state = open_state(session_id);
  validate_chunk_length(chunk_length_words);
  state.info.chunk_length_words = chunk_length_words;
}

void IngestService::close_session(const std::string& session_id) {
  std::lock_guard lock(mutex_);
  auto& state = open_state(session_id);
  state.info.closed = true;
  std::vector<std::string> tracks(state.info.tracks.begin(), state.info.tracks.end());
  if (tracks.empty()) {
    bus_->publish(wire::topics::kAudio, wire::track_key(session_id, ""),
                  wire::encode(wire::TrackEnd{session_id, "", tracks}));
    return;
  }
  for (const auto& track : tracks) {
    bus_->publish(wire::topics::kAudio, wire::track_key(session_id, track),
                  wire::encode(wire::TrackEnd{session_id, track, tracks}));
  }
}

void IngestService::register_speaker(const std::string& session_id, const std::string& track_id,
                                     std::string label) {
  std::lock_guard lock(mutex_);
  auto& state = open_state(session_id);
  if (label.empty() || label.find('\n') != std::string::npos) {
    throw ValidationError("speaker label must be a non-empty single line");
  }
  state.speakers[track_id] = std::move(label);
}

SessionInfo IngestService::session(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  const auto& state = any_state(session_id);
  if (state.info.closed) throw NotFoundError("no open session " + session_id);
  return state.info;
}

std::optional<SessionInfo> IngestService::find(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) return std::nullopt;
  return it->second.info;
}

int IngestService::chunk_length_words(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  return any_state(session_id).info.chunk_length_words;
}

std::string IngestService::speaker_label(const std::string& session_id,
                                         const std::string& track_id) const {
  std::lock_guard lock(mutex_);
  const auto& state = any_state(session_id);
  auto it = state.speakers.find(track_id);
  return it == state.speakers.end() ? track_id : it->second;
}

}  // namespace minuteman::ingest
