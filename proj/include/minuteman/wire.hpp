#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "minuteman/asr_client.hpp"
#include "minuteman/audio.hpp"
#include "minuteman/orchestrator.hpp"
#include "minuteman/segmenter.hpp"
#include "minuteman/transcript_doc.hpp"

// Bus payloads and JSON forms shared by the pipeline stages, the gateway and
// the replay tool.
namespace minuteman::wire {

namespace topics {
inline constexpr std::string_view kAudio = "audio";
inline constexpr std::string_view kUtteranceAudio = "utterance-audio";
inline constexpr std::string_view kUtteranceText = "utterance-text";
inline constexpr std::string_view kSummarizeRequest = "summarize-request";
inline constexpr std::string_view kSummarizeResponse = "summarize-response";
}  // namespace topics

std::string track_key(std::string_view session_id, std::string_view track_id);

/// Sent on "audio" after a track's last chunk when the session closes.
struct TrackEnd {
  std::string session_id;
  std::string track_id;  // empty for a session that never had a track
  std::vector<std::string> session_tracks;
};

using AudioMessage = std::variant<audio::AudioChunk, TrackEnd>;

std::string encode(const audio::AudioChunk& chunk);
std::string encode(const TrackEnd& end);
AudioMessage decode_audio_message(std::string_view payload);

/// Sent on "utterance-audio" and "utterance-text" once a session has no more
/// utterances; `last_seq` is the highest finalize_seq issued.
struct SessionEnd {
  std::string session_id;
  std::uint64_t last_seq = 0;
};

using UtteranceAudioMessage = std::variant<segmenter::UtteranceAudio, SessionEnd>;

std::string encode(const segmenter::UtteranceAudio& utterance);
std::string encode_utterance_audio_end(const SessionEnd& end);
UtteranceAudioMessage decode_utterance_audio(std::string_view payload);

/// Transcribed utterance. An empty text marks a discarded utterance that
/// still consumes its sequence number.
struct UtteranceText {
  std::string session_id;
  asr::Utterance utterance;
};

using UtteranceTextMessage = std::variant<UtteranceText, SessionEnd>;

std::string encode(const UtteranceText& utterance);
std::string encode_utterance_text_end(const SessionEnd& end);
UtteranceTextMessage decode_utterance_text(std::string_view payload);

std::string encode(const orchestrator::SummarizeRequest& request);
orchestrator::SummarizeRequest decode_summarize_request(std::string_view payload);
std::string encode(const orchestrator::SummarizeResponse& response);
orchestrator::SummarizeResponse decode_summarize_response(std::string_view payload);

// Document sync protocol.
nlohmann::json to_json(const doc::LineAttrs& attrs);
doc::LineAttrs attrs_from_json(const nlohmann::json& j);
nlohmann::json to_json(const doc::Components& components);
/// Throws MalformedEditError on anything that is not a component list.
doc::Components components_from_json(const nlohmann::json& j);
nlohmann::json snapshot_json(const doc::LineDoc& doc);
nlohmann::json edit_applied_json(const doc::LineDoc::Applied& applied);
nlohmann::json to_json(const orchestrator::SummaryPoint& point);

}  // namespace minuteman::wire
