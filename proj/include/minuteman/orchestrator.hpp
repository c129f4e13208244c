#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "minuteman/events.hpp"
#include "minuteman/transcript_doc.hpp"

namespace minuteman::orchestrator {

inline constexpr std::string_view kPlaceholder = "[summarizing…]";
inline constexpr std::string_view kUpdatingSuffix = " [updating…]";
inline constexpr std::string_view kNoMatchingLines = "[no matching transcript lines]";
inline constexpr double kDefaultDebounceS = 2.0;

enum class PointKind { kAuto, kOnDemand };
enum class PointState { kPending, kGenerated, kFrozen };

std::string_view to_string(PointKind kind);
std::string_view to_string(PointState state);

struct SummaryPoint {
  std::uint64_t summary_id = 0;
  PointKind kind = PointKind::kAuto;
  doc::SegmentRange range;
  PointState state = PointState::kPending;
  std::string text;
  std::string source_snapshot;
  std::uint64_t request_seq = 0;
};

struct SummarizeRequest {
  std::string session_id;
  std::uint64_t summary_id = 0;
  std::uint64_t request_seq = 0;
  std::string segment_text;
};

struct SummarizeResponse {
  std::string session_id;
  std::uint64_t summary_id = 0;
  std::uint64_t request_seq = 0;
  std::string summary_text;
};

/// Summary-point lifecycle of one session.
///
/// The orchestrator edits the summary pad directly with the system author and
/// reports every such change through `on_summary_changed` so it can be
/// broadcast. It never blocks: requests to publish are returned to the caller.
class SummaryOrchestrator {
 public:
  struct Hooks {
    std::function<void(const doc::LineDoc::Applied&)> on_summary_changed;
    EventSink on_event;
  };

  SummaryOrchestrator(std::string session_id, doc::LineDoc& transcript, doc::LineDoc& summary,
                      Hooks hooks, double debounce_s = kDefaultDebounceS);

  /// Checks the unsummarized-word threshold after an utterance was appended.
  std::optional<SummarizeRequest> on_utterance_appended(std::uint64_t utt_seq,
                                                        std::size_t chunk_length_words,
                                                        double now_s);

  /// User-selected range. Returns nullopt when the range matches no lines;
  /// the point is then created already generated with a fixed notice.
  std::optional<SummarizeRequest> request_on_demand(doc::SegmentRange range, double now_s);

  /// Applies a backend response if it is current and the point not frozen.
  /// Returns true when the pad was updated.
  bool on_summary_response(const SummarizeResponse& response, double now_s);

  /// Notes a user edit of the transcript; re-summarization waits for the
  /// debounce window to pass without further edits.
  void on_transcript_edit(double now_s);

  /// Freezes every point whose pad line a user edit changed or removed.
  void on_summary_edit(const doc::LineDoc::Applied& applied, double now_s);

  /// Runs the debounced re-extraction once the transcript has been quiet for
  /// the debounce window.
  std::vector<SummarizeRequest> tick(double now_s);

  const std::map<std::uint64_t, SummaryPoint>& points() const { return points_; }
  std::uint64_t last_summarized_seq() const { return last_summarized_seq_; }
  bool has_pending_edits() const { return edit_pending_; }
  /// Points waiting for a response.
  std::size_t outstanding() const;
  double debounce_s() const { return debounce_s_; }

 private:
  SummarizeRequest issue(SummaryPoint& point, double now_s);
  void set_line_text(const SummaryPoint& point, std::string_view text);
  void emit(Event event, double now_s);

  std::string session_id_;
  doc::LineDoc& transcript_;
  doc::LineDoc& summary_;
  Hooks hooks_;
  double debounce_s_;

  std::map<std::uint64_t, SummaryPoint> points_;
  std::uint64_t last_summarized_seq_ = 0;
  std::uint64_t next_summary_id_ = 1;
  std::uint64_t next_request_seq_ = 1;
  bool edit_pending_ = false;
  double last_edit_s_ = 0;
};

}  // namespace minuteman::orchestrator
