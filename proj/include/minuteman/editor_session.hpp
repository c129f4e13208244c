#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "minuteman/asr_client.hpp"
#include "minuteman/events.hpp"
#include "minuteman/orchestrator.hpp"
#include "minuteman/transcript_doc.hpp"

namespace minuteman::editor {

inline constexpr std::string_view kTranscriptDoc = "transcript";
inline constexpr std::string_view kSummaryDoc = "summary";

/// Receives every message for connected clients, in the order the session
/// produced them. Called with the session lock held; must not block.
using Listener = std::function<void(const nlohmann::json&)>;

/// The two pads of a session plus its summary orchestrator.
///
/// Every mutation goes through one mutex, which makes this the single
/// logical writer of both documents. Summarize requests are returned to the
/// caller, which publishes them outside the lock.
class EditorSession {
 public:
  EditorSession(std::string session_id, double debounce_s, EventSink events);

  EditorSession(const EditorSession&) = delete;
  EditorSession& operator=(const EditorSession&) = delete;

  struct Joined {
    std::uint64_t listener_id = 0;
    /// Snapshot, points and debug messages; the listener receives everything
    /// after them.
    std::vector<nlohmann::json> initial;
  };
  Joined join(Listener listener);
  void leave(std::uint64_t listener_id);

  /// Transcribed (or discarded, when nullopt) utterance from the ASR stage.
  /// Utterances are appended in utt_seq order; out-of-order ones are held.
  std::vector<orchestrator::SummarizeRequest> accept_utterance(
      std::uint64_t utt_seq, std::optional<asr::Utterance> utterance,
      std::size_t chunk_length_words, double now_s);

  /// A user edit on either pad. Throws ValidationError for the reserved
  /// system author, NotFoundError for an unknown doc and MalformedEditError
  /// for components that do not fit.
  doc::LineDoc::Applied apply_user_edit(const doc::EditOp& op, double now_s);

  std::optional<orchestrator::SummarizeRequest> request_on_demand(doc::SegmentRange range,
                                                                  double now_s);
  void on_summary_response(const orchestrator::SummarizeResponse& response, double now_s);
  std::vector<orchestrator::SummarizeRequest> tick(double now_s);

  void set_debug(bool enabled);
  bool debug() const;

  /// The ASR stage has delivered every utterance up to `last_seq`.
  void set_last_utterance(std::uint64_t last_seq);
  /// True once every utterance of a closed session has been appended or
  /// discarded.
  bool transcript_complete() const;
  /// No outstanding summarize requests and no edit waiting for its debounce.
  bool summaries_settled() const;

  std::string text(std::string_view doc_id) const;
  nlohmann::json snapshot(std::string_view doc_id) const;
  nlohmann::json points_json() const;

  /// Runs `fn(transcript, summary, orchestrator)` under the session lock.
  template <typename Fn>
  auto inspect(Fn&& fn) const {
    std::lock_guard lock(mutex_);
    return fn(transcript_, summary_, orchestrator_);
  }

  const std::string& session_id() const { return session_id_; }

 private:
  void broadcast(const nlohmann::json& message);
  void broadcast_points();
  nlohmann::json points_locked() const;
  void emit(Event event, double now_s);
  doc::LineDoc& doc_for(std::string_view doc_id);
  const doc::LineDoc& doc_for(std::string_view doc_id) const;

  const std::string session_id_;
  EventSink events_;
  mutable std::mutex mutex_;
  doc::LineDoc transcript_;
  doc::LineDoc summary_;
  orchestrator::SummaryOrchestrator orchestrator_;
  asr::Resequencer resequencer_;
  std::optional<std::uint64_t> last_seq_;
  bool debug_ = false;
  std::map<std::uint64_t, Listener> listeners_;
  std::uint64_t next_listener_ = 1;
  nlohmann::json last_points_;
};

}  // namespace minuteman::editor
