#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "minuteman/asr_client.hpp"
#include "minuteman/audio_ingest.hpp"
#include "minuteman/clock.hpp"
#include "minuteman/editor_session.hpp"
#include "minuteman/event_bus.hpp"
#include "minuteman/events.hpp"
#include "minuteman/orchestrator.hpp"
#include "minuteman/segmenter.hpp"
#include "minuteman/summarizer_client.hpp"

namespace minuteman {

struct PipelineOptions {
  /// "mock:", "mock:<manifest.json>" or an HTTP base URL.
  std::string asr_url = "mock:";
  /// "mock:" or an HTTP base URL.
  std::string summ_url = "mock:";
  /// Take precedence over the URLs when set.
  std::shared_ptr<asr::AsrBackend> asr_backend;
  std::shared_ptr<summarizer::SummarizerBackend> summarizer_backend;

  summarizer::PreprocessConfig preprocess = summarizer::PreprocessConfig::defaults();
  std::shared_ptr<const segmenter::VoiceDetector> vad;
  int max_utterance_s = segmenter::kDefaultMaxUtteranceSeconds;
  double debounce_s = orchestrator::kDefaultDebounceS;
  std::size_t bus_capacity = EventBus::kDefaultCapacity;
  RetryPolicy retry;
  Sleeper sleep = real_sleep;
  /// Defaults to a SteadyClock.
  std::shared_ptr<const Clock> clock;
  EventSink on_event;
  std::size_t asr_workers = 2;
  std::size_t summarizer_workers = 2;
};

/// The whole service in one process: ingestion, the four bus stages
/// (segmentation, transcription, editing, summarization) and the sessions'
/// editor state.
///
/// Stages run either on worker threads (start()/stop()) or are driven
/// step by step with pump_once()/drain(), which is what the replay tool and
/// tests use for deterministic runs.
class Pipeline {
 public:
  explicit Pipeline(PipelineOptions options = {});
  ~Pipeline();

  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  ingest::SessionInfo create_session(std::optional<int> chunk_length_words = std::nullopt);
  std::uint64_t ingest_chunk(const std::string& session_id, const std::string& track_id,
                             std::uint64_t chunk_seq, std::string_view payload);
  void set_chunk_length(const std::string& session_id, int chunk_length_words);
  void register_speaker(const std::string& session_id, const std::string& track_id,
                        std::string label);
  void close_session(const std::string& session_id);

  /// Editor state of any session ever created. Throws NotFoundError.
  std::shared_ptr<editor::EditorSession> session(const std::string& session_id) const;

  doc::LineDoc::Applied apply_edit(const std::string& session_id, const doc::EditOp& op);
  /// Throws ValidationError for an inverted or zero-based range.
  void request_summary(const std::string& session_id, doc::SegmentRange range);
  void set_debug(const std::string& session_id, bool enabled);

  /// Runs the debounced re-summarization check of every session.
  void tick();

  /// Handles at most one message, trying the stages in pipeline order.
  bool pump_once();
  /// Pumps until no stage has a deliverable message. Returns the count.
  std::size_t drain();

  void start();
  void stop();
  bool running() const { return running_; }

  /// The session is closed, every utterance is in the transcript, no
  /// summary request is outstanding and no edit awaits its debounce.
  bool quiescent(const std::string& session_id) const;

  double now_s() const { return clock_->now_s(); }
  ingest::IngestService& ingest() { return ingest_; }
  EventBus& bus() { return *bus_; }
  const PipelineOptions& options() const { return options_; }

 private:
  using Handler = void (Pipeline::*)(const BusMessage&);
  struct Stage {
    std::string name;
    Handler handler;
    std::unique_ptr<Subscription> subscription;
  };

  void handle_audio(const BusMessage& message);
  void handle_utterance_audio(const BusMessage& message);
  void handle_utterance_text(const BusMessage& message);
  void handle_summarize_request(const BusMessage& message);
  void handle_summarize_response(const BusMessage& message);

  void dispatch(Stage& stage, const BusMessage& message);
  void worker(Stage* stage);
  void publish_requests(const std::vector<orchestrator::SummarizeRequest>& requests);
  void emit(Event event);

  PipelineOptions options_;
  std::shared_ptr<const Clock> clock_;
  std::shared_ptr<EventBus> bus_;
  ingest::IngestService ingest_;
  std::unique_ptr<asr::Transcriber> transcriber_;
  std::unique_ptr<summarizer::Summarizer> summarizer_;

  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<editor::EditorSession>> sessions_;

  std::mutex segmenter_mutex_;
  std::map<std::string, segmenter::SessionSegmenter> segmenters_;
  std::map<std::string, std::set<std::string>> ended_tracks_;

  std::mutex filter_mutex_;
  std::map<std::string, IdempotencyFilter> filters_;  // per stage

  std::mutex events_mutex_;
  std::vector<std::unique_ptr<Stage>> stages_;
  std::vector<std::unique_ptr<Stage>> extra_workers_;
  std::vector<std::thread> threads_;
  std::atomic<bool> running_{false};
  std::atomic<bool> stopping_{false};
};

}  // namespace minuteman
