#include "minuteman/orchestrator.hpp"

#include "minuteman/errors.hpp"

namespace minuteman::orchestrator {

namespace {

std::string range_string(doc::SegmentRange r) {
  return std::to_string(r.start_seq) + "-" + std::to_string(r.end_seq);
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::string_view to_string(PointKind kind) {
  return kind == PointKind::kAuto ? "auto" : "on-demand";
}

std::string_view to_string(PointState state) {
  switch (state) {
    case PointState::kPending:
      return "pending";
    case PointState::kGenerated:
      return "generated";
    case PointState::kFrozen:
      return "frozen";
  }
  return "unknown";
}

SummaryOrchestrator::SummaryOrchestrator(std::string session_id, doc::LineDoc& transcript,
                                         doc::LineDoc& summary, Hooks hooks, double debounce_s)
    : session_id_(std::move(session_id)),
      transcript_(transcript),
      summary_(summary),
      hooks_(std::move(hooks)),
      debounce_s_(debounce_s) {}

void SummaryOrchestrator::emit(Event event, double now_s) {
  if (!hooks_.on_event) return;
  event.time_s = now_s;
  event.session_id = session_id_;
  hooks_.on_event(event);
}

std::size_t SummaryOrchestrator::outstanding() const {
  std::size_t n = 0;
  for (const auto& [id, point] : points_) n += point.state == PointState::kPending;
  return n;
}

void SummaryOrchestrator::set_line_text(const SummaryPoint& point, std::string_view text) {
  auto line = summary_.find_summary(point.summary_id);
  if (!line) return;
  if (summary_.lines()[*line].text == text) return;
  auto applied = summary_.replace_line_text(*line, text, doc::kSystemAuthor);
  if (hooks_.on_summary_changed) hooks_.on_summary_changed(applied);
}

SummarizeRequest SummaryOrchestrator::issue(SummaryPoint& point, double now_s) {
  point.request_seq = next_request_seq_++;
  point.state = PointState::kPending;
  Event event;
  event.type = "request";
  emit(event.with("summary_id", point.summary_id).with("request_seq", point.request_seq),
       now_s);
  return SummarizeRequest{session_id_, point.summary_id, point.request_seq,
                          point.source_snapshot};
}

std::optional<SummarizeRequest> SummaryOrchestrator::on_utterance_appended(
    std::uint64_t utt_seq, std::size_t chunk_length_words, double now_s) {
  if (utt_seq <= last_summarized_seq_) return std::nullopt;
  doc::SegmentRange range{last_summarized_seq_ + 1, utt_seq};
  auto segment = doc::extract_segment(transcript_.lines(), range);
  auto words = doc::word_count(segment.text);
  if (words < chunk_length_words) return std::nullopt;

  SummaryPoint point;
  point.summary_id = next_summary_id_++;
  point.kind = PointKind::kAuto;
  point.range = range;
  point.text = std::string(kPlaceholder);
  point.source_snapshot = std::move(segment.text);
  last_summarized_seq_ = utt_seq;

  auto applied = summary_.append_line(point.text, doc::LineAttrs{std::nullopt, point.summary_id},
                                      doc::kSystemAuthor);
  if (hooks_.on_summary_changed) hooks_.on_summary_changed(applied);

  Event trigger;
  trigger.type = "trigger";
  emit(trigger.with("summary_id", point.summary_id)
           .with("kind", "auto")
           .with("range", range_string(range))
           .with("words", words),
       now_s);
  auto& stored = points_[point.summary_id] = std::move(point);
  auto request = issue(stored, now_s);
  return request;
}

std::optional<SummarizeRequest> SummaryOrchestrator::request_on_demand(doc::SegmentRange range,
                                                                       double now_s) {
  if (range.start_seq == 0 || range.start_seq > range.end_seq) {
    throw ValidationError("summary range must satisfy 1 <= start_seq <= end_seq");
  }
  auto segment = doc::extract_segment(transcript_.lines(), range);

  SummaryPoint point;
  point.summary_id = next_summary_id_++;
  point.kind = PointKind::kOnDemand;
  point.range = range;
  point.source_snapshot = segment.text;
  const bool empty = segment.line_indices.empty();
  point.text = std::string(empty ? kNoMatchingLines : kPlaceholder);
  point.state = empty ? PointState::kGenerated : PointState::kPending;

  auto applied = summary_.append_line(point.text, doc::LineAttrs{std::nullopt, point.summary_id},
                                      doc::kSystemAuthor);
  if (hooks_.on_summary_changed) hooks_.on_summary_changed(applied);

  Event trigger;
  trigger.type = "trigger";
  emit(trigger.with("summary_id", point.summary_id)
           .with("kind", "on-demand")
           .with("range", range_string(range))
           .with("words", doc::word_count(segment.text)),
       now_s);
  auto& stored = points_[point.summary_id] = std::move(point);
  if (empty) return std::nullopt;
  return issue(stored, now_s);
}

bool SummaryOrchestrator::on_summary_response(const SummarizeResponse& response, double now_s) {
  Event event;
  event.type = "response";
  event.with("summary_id", response.summary_id).with("request_seq", response.request_seq);

  auto it = points_.find(response.summary_id);
  if (it == points_.end() || it->second.request_seq != response.request_seq) {
    emit(event.with("outcome", it == points_.end() ? "unknown" : "stale"), now_s);
    return false;
  }
  auto& point = it->second;
  if (point.state == PointState::kFrozen) {
    emit(event.with("outcome", "frozen"), now_s);
    return false;
  }
  if (point.state == PointState::kGenerated) {
    // Redelivered response for a request that was already applied.
    emit(event.with("outcome", "duplicate"), now_s);
    return false;
  }
  point.text = response.summary_text;
  point.state = PointState::kGenerated;
  set_line_text(point, point.text);
  emit(event.with("outcome", "applied").with("text", point.text), now_s);
  return true;
}

void SummaryOrchestrator::on_transcript_edit(double now_s) {
  edit_pending_ = true;
  last_edit_s_ = now_s;
}

void SummaryOrchestrator::on_summary_edit(const doc::LineDoc::Applied& applied, double now_s) {
  for (const auto& attrs : applied.modified) {
    if (!attrs.summary_id) continue;
    auto it = points_.find(*attrs.summary_id);
    if (it == points_.end() || it->second.state == PointState::kFrozen) continue;
    it->second.state = PointState::kFrozen;
    Event event;
    event.type = "freeze";
    emit(event.with("summary_id", it->first).with("author", applied.op.author), now_s);
  }
  for (auto& [id, point] : points_) {
    if (point.state != PointState::kFrozen) continue;
    auto line = summary_.find_summary(id);
    point.text = line ? summary_.lines()[*line].text : std::string();
  }
}

std::vector<SummarizeRequest> SummaryOrchestrator::tick(double now_s) {
  std::vector<SummarizeRequest> requests;
  if (!edit_pending_ || now_s - last_edit_s_ < debounce_s_) return requests;
  edit_pending_ = false;

  for (auto& [id, point] : points_) {
    if (point.state == PointState::kFrozen) continue;
    auto segment = doc::extract_segment(transcript_.lines(), point.range);
    if (segment.text == point.source_snapshot) continue;
    point.source_snapshot = std::move(segment.text);
    if (point.state == PointState::kGenerated && !ends_with(point.text, kUpdatingSuffix)) {
      point.text += kUpdatingSuffix;
      set_line_text(point, point.text);
    }
    Event resummarize;
    resummarize.type = "resummarize";
    emit(resummarize.with("summary_id", id).with("range", range_string(point.range)), now_s);
    requests.push_back(issue(point, now_s));
  }
  return requests;
}

}  // namespace minuteman::orchestrator
