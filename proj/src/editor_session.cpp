#include "minuteman/editor_session.hpp"

#include <cstdio>

#include "minuteman/errors.hpp"
#include "minuteman/wire.hpp"

namespace minuteman::editor {

using nlohmann::json;

EditorSession::EditorSession(std::string session_id, double debounce_s, EventSink events)
    : session_id_(std::move(session_id)),
      events_(std::move(events)),
      transcript_(std::string(kTranscriptDoc)),
      summary_(std::string(kSummaryDoc)),
      orchestrator_(session_id_, transcript_, summary_,
                    orchestrator::SummaryOrchestrator::Hooks{
                        [this](const doc::LineDoc::Applied& applied) {
                          broadcast(wire::edit_applied_json(applied));
                        },
                        [this](const Event& event) {
                          if (events_) events_(event);
                        }},
                    debounce_s),
      last_points_(json::array()) {}

void EditorSession::broadcast(const json& message) {
  for (auto& [id, listener] : listeners_) listener(message);
}

void EditorSession::broadcast_points() {
  auto points = points_locked();
  if (points == last_points_) return;
  last_points_ = points;
  broadcast(json{{"type", "points"}, {"points", std::move(points)}});
}

void EditorSession::emit(Event event, double now_s) {
  if (!events_) return;
  event.time_s = now_s;
  event.session_id = session_id_;
  events_(event);
}

doc::LineDoc& EditorSession::doc_for(std::string_view doc_id) {
  if (doc_id == kTranscriptDoc) return transcript_;
  if (doc_id == kSummaryDoc) return summary_;
  throw NotFoundError("no document " + std::string(doc_id));
}

const doc::LineDoc& EditorSession::doc_for(std::string_view doc_id) const {
  return const_cast<EditorSession*>(this)->doc_for(doc_id);
}

EditorSession::Joined EditorSession::join(Listener listener) {
  std::lock_guard lock(mutex_);
  Joined joined;
  joined.listener_id = next_listener_++;
  joined.initial.push_back(wire::snapshot_json(transcript_));
  joined.initial.push_back(wire::snapshot_json(summary_));
  joined.initial.push_back(json{{"type", "points"}, {"points", points_locked()}});
  joined.initial.push_back(json{{"type", "debug"}, {"enabled", debug_}});
  listeners_.emplace(joined.listener_id, std::move(listener));
  return joined;
}

void EditorSession::leave(std::uint64_t listener_id) {
  std::lock_guard lock(mutex_);
  listeners_.erase(listener_id);
}

std::vector<orchestrator::SummarizeRequest> EditorSession::accept_utterance(
    std::uint64_t utt_seq, std::optional<asr::Utterance> utterance,
    std::size_t chunk_length_words, double now_s) {
  std::lock_guard lock(mutex_);
  std::vector<orchestrator::SummarizeRequest> requests;
  for (auto& slot : resequencer_.offer(utt_seq, std::move(utterance))) {
    if (!slot.utterance) {
      Event discard;
      discard.type = "discard";
      emit(discard.with("utt_seq", slot.utt_seq), now_s);
      continue;
    }
    const auto& u = *slot.utterance;
    auto applied = transcript_.append_utterance(u);
    if (!applied) continue;
    broadcast(wire::edit_applied_json(*applied));
    Event append;
    append.type = "append";
    char times[64];
    std::snprintf(times, sizeof times, "%.3f", u.start_time_s);
    append.with("utt_seq", u.utt_seq).with("track", u.track_id).with("start", times);
    std::snprintf(times, sizeof times, "%.3f", u.end_time_s);
    append.with("end", times).with("speaker", u.speaker_label).with("text", u.text);
    emit(append, now_s);
    if (auto request = orchestrator_.on_utterance_appended(u.utt_seq, chunk_length_words, now_s)) {
      requests.push_back(std::move(*request));
    }
  }
  broadcast_points();
  return requests;
}

doc::LineDoc::Applied EditorSession::apply_user_edit(const doc::EditOp& op, double now_s) {
  if (op.author.empty() || op.author == doc::kSystemAuthor) {
    throw ValidationError("edits need a user author other than \"system\"");
  }
  std::lock_guard lock(mutex_);
  auto& target = doc_for(op.doc_id);
  auto applied = target.apply_edit(op);
  broadcast(wire::edit_applied_json(applied));

  Event edit;
  edit.type = "edit";
  emit(edit.with("doc", target.id()).with("revision", applied.revision).with("author", op.author),
       now_s);
  if (&target == &transcript_) {
    orchestrator_.on_transcript_edit(now_s);
  } else {
    orchestrator_.on_summary_edit(applied, now_s);
  }
  broadcast_points();
  return applied;
}

std::optional<orchestrator::SummarizeRequest> EditorSession::request_on_demand(
    doc::SegmentRange range, double now_s) {
  std::lock_guard lock(mutex_);
  auto request = orchestrator_.request_on_demand(range, now_s);
  broadcast_points();
  return request;
}

void EditorSession::on_summary_response(const orchestrator::SummarizeResponse& response,
                                        double now_s) {
  std::lock_guard lock(mutex_);
  orchestrator_.on_summary_response(response, now_s);
  broadcast_points();
}

std::vector<orchestrator::SummarizeRequest> EditorSession::tick(double now_s) {
  std::lock_guard lock(mutex_);
  auto requests = orchestrator_.tick(now_s);
  if (!requests.empty()) broadcast_points();
  return requests;
}

void EditorSession::set_debug(bool enabled) {
  std::lock_guard lock(mutex_);
  debug_ = enabled;
  broadcast(json{{"type", "debug"}, {"enabled", enabled}});
}

bool EditorSession::debug() const {
  std::lock_guard lock(mutex_);
  return debug_;
}

void EditorSession::set_last_utterance(std::uint64_t last_seq) {
  std::lock_guard lock(mutex_);
  last_seq_ = last_seq;
}

bool EditorSession::transcript_complete() const {
  std::lock_guard lock(mutex_);
  return last_seq_ && resequencer_.next_expected() > *last_seq_;
}

bool EditorSession::summaries_settled() const {
  std::lock_guard lock(mutex_);
  return orchestrator_.outstanding() == 0 && !orchestrator_.has_pending_edits();
}

std::string EditorSession::text(std::string_view doc_id) const {
  std::lock_guard lock(mutex_);
  return doc_for(doc_id).text();
}

json EditorSession::snapshot(std::string_view doc_id) const {
  std::lock_guard lock(mutex_);
  return wire::snapshot_json(doc_for(doc_id));
}

json EditorSession::points_json() const {
  std::lock_guard lock(mutex_);
  return points_locked();
}

json EditorSession::points_locked() const {
  json points = json::array();
  for (const auto& [id, point] : orchestrator_.points()) points.push_back(wire::to_json(point));
  return points;
}

}  // namespace minuteman::editor
