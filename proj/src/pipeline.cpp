#include "minuteman/pipeline.hpp"

#include <chrono>

#include <spdlog/spdlog.h>

#include "minuteman/errors.hpp"
#include "minuteman/wire.hpp"

namespace minuteman {

namespace {

constexpr auto kWorkerPoll = std::chrono::milliseconds(50);
constexpr auto kTickInterval = std::chrono::milliseconds(100);

}  // namespace

Pipeline::Pipeline(PipelineOptions options)
    : options_(std::move(options)),
      clock_(options_.clock ? options_.clock : std::make_shared<SteadyClock>()),
      bus_(EventBus::create(options_.bus_capacity)),
      ingest_(bus_) {
  auto asr_backend = options_.asr_backend ? options_.asr_backend
                                          : asr::make_backend(options_.asr_url);
  auto summ_backend = options_.summarizer_backend
                          ? options_.summarizer_backend
                          : summarizer::make_backend(options_.summ_url);
  transcriber_ = std::make_unique<asr::Transcriber>(asr_backend, options_.retry, options_.sleep);
  summarizer_ = std::make_unique<summarizer::Summarizer>(summ_backend, options_.preprocess,
                                                         options_.retry, options_.sleep);
  if (!options_.vad) options_.vad = std::make_shared<segmenter::EnergyVad>();

  auto add = [&](std::string name, Handler handler, std::string_view topic,
                 std::string_view group) {
    stages_.push_back(std::make_unique<Stage>(
        Stage{std::move(name), handler, bus_->subscribe(topic, group)}));
  };
  add("segmenter", &Pipeline::handle_audio, wire::topics::kAudio, "segmenter");
  add("asr", &Pipeline::handle_utterance_audio, wire::topics::kUtteranceAudio, "asr");
  add("editor", &Pipeline::handle_utterance_text, wire::topics::kUtteranceText, "editor");
  add("summarizer", &Pipeline::handle_summarize_request, wire::topics::kSummarizeRequest,
      "summarizer");
  add("editor-responses", &Pipeline::handle_summarize_response,
      wire::topics::kSummarizeResponse, "editor");
}

Pipeline::~Pipeline() {
  stop();
  bus_->shutdown();
}

void Pipeline::emit(Event event) {
  if (!options_.on_event) return;
  std::lock_guard lock(events_mutex_);
  options_.on_event(event);
}

ingest::SessionInfo Pipeline::create_session(std::optional<int> chunk_length_words) {
  auto info = ingest_.create_session(chunk_length_words);
  {
    std::lock_guard lock(sessions_mutex_);
    sessions_.emplace(info.session_id,
                      std::make_shared<editor::EditorSession>(
                          info.session_id, options_.debounce_s,
                          [this](const Event& event) { emit(event); }));
  }
  Event event;
  event.time_s = now_s();
  event.session_id = info.session_id;
  event.type = "create";
  emit(event.with("chunk_length_words", static_cast<std::uint64_t>(info.chunk_length_words)));
  return info;
}

std::uint64_t Pipeline::ingest_chunk(const std::string& session_id, const std::string& track_id,
                                     std::uint64_t chunk_seq, std::string_view payload) {
  return ingest_.ingest_chunk(session_id, track_id, chunk_seq, payload);
}

void Pipeline::set_chunk_length(const std::string& session_id, int chunk_length_words) {
  ingest_.set_chunk_length(session_id, chunk_length_words);
  Event event;
  event.time_s = now_s();
  event.session_id = session_id;
  event.type = "config";
  emit(event.with("chunk_length_words", static_cast<std::uint64_t>(chunk_length_words)));
}

void Pipeline::register_speaker(const std::string& session_id, const std::string& track_id,
                                std::string label) {
  ingest_.register_speaker(session_id, track_id, std::move(label));
}

void Pipeline::close_session(const std::string& session_id) {
  ingest_.close_session(session_id);
  Event event;
  event.time_s = now_s();
  event.session_id = session_id;
  event.type = "close";
  emit(event);
}

std::shared_ptr<editor::EditorSession> Pipeline::session(const std::string& session_id) const {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw NotFoundError("no session " + session_id);
  return it->second;
}

doc::LineDoc::Applied Pipeline::apply_edit(const std::string& session_id,
                                           const doc::EditOp& op) {
  return session(session_id)->apply_user_edit(op, now_s());
}

void Pipeline::request_summary(const std::string& session_id, doc::SegmentRange range) {
  auto editor = session(session_id);
  if (auto request = editor->request_on_demand(range, now_s())) publish_requests({*request});
}

void Pipeline::set_debug(const std::string& session_id, bool enabled) {
  session(session_id)->set_debug(enabled);
}

void Pipeline::tick() {
  std::vector<std::shared_ptr<editor::EditorSession>> all;
  {
    std::lock_guard lock(sessions_mutex_);
    for (const auto& [id, s] : sessions_) all.push_back(s);
  }
  const double now = now_s();
  for (const auto& s : all) publish_requests(s->tick(now));
}

void Pipeline::publish_requests(const std::vector<orchestrator::SummarizeRequest>& requests) {
  for (const auto& request : requests) {
    bus_->publish(wire::topics::kSummarizeRequest, request.session_id, wire::encode(request));
  }
}

void Pipeline::handle_audio(const BusMessage& message) {
  auto decoded = wire::decode_audio_message(message.payload);
  std::vector<segmenter::UtteranceAudio> utterances;
  std::optional<wire::SessionEnd> end;
  {
    std::lock_guard lock(segmenter_mutex_);
    auto session_of = [&](const std::string& sid) -> segmenter::SessionSegmenter& {
      auto it = segmenters_.find(sid);
      if (it == segmenters_.end()) {
        it = segmenters_
                 .emplace(sid, segmenter::SessionSegmenter(sid, options_.vad,
                                                           options_.max_utterance_s))
                 .first;
      }
      return it->second;
    };
    if (auto* chunk = std::get_if<audio::AudioChunk>(&decoded)) {
      utterances = session_of(chunk->session_id).process(*chunk);
    } else {
      const auto& marker = std::get<wire::TrackEnd>(decoded);
      auto& seg = session_of(marker.session_id);
      if (!marker.track_id.empty()) {
        utterances = seg.end_track(marker.track_id);
        ended_tracks_[marker.session_id].insert(marker.track_id);
      }
      const auto& ended = ended_tracks_[marker.session_id];
      bool all_ended = true;
      for (const auto& t : marker.session_tracks) all_ended = all_ended && ended.contains(t);
      if (all_ended) {
        for (auto& u : seg.finish()) utterances.push_back(std::move(u));
        end = wire::SessionEnd{marker.session_id, seg.last_finalize_seq()};
        segmenters_.erase(marker.session_id);
        ended_tracks_.erase(marker.session_id);
      }
    }
  }
  for (const auto& u : utterances) {
    bus_->publish(wire::topics::kUtteranceAudio, u.session_id, wire::encode(u));
  }
  if (end) {
    bus_->publish(wire::topics::kUtteranceAudio, end->session_id,
                  wire::encode_utterance_audio_end(*end));
  }
}

void Pipeline::handle_utterance_audio(const BusMessage& message) {
  auto decoded = wire::decode_utterance_audio(message.payload);
  if (auto* end = std::get_if<wire::SessionEnd>(&decoded)) {
    bus_->publish(wire::topics::kUtteranceText, end->session_id,
                  wire::encode_utterance_text_end(*end));
    return;
  }
  const auto& audio = std::get<segmenter::UtteranceAudio>(decoded);
  wire::UtteranceText out;
  out.session_id = audio.session_id;
  out.utterance.utt_seq = audio.finalize_seq;
  out.utterance.track_id = audio.track_id;
  out.utterance.speaker_label = ingest_.speaker_label(audio.session_id, audio.track_id);
  out.utterance.text = transcriber_->transcribe(audio);
  out.utterance.start_time_s = audio.start_time_s;
  out.utterance.end_time_s = audio.end_time_s;
  bus_->publish(wire::topics::kUtteranceText, out.session_id, wire::encode(out));
}

void Pipeline::handle_utterance_text(const BusMessage& message) {
  auto decoded = wire::decode_utterance_text(message.payload);
  if (auto* end = std::get_if<wire::SessionEnd>(&decoded)) {
    session(end->session_id)->set_last_utterance(end->last_seq);
    return;
  }
  auto& u = std::get<wire::UtteranceText>(decoded);
  std::optional<asr::Utterance> slot;
  if (!u.utterance.text.empty()) slot = u.utterance;
  auto words = static_cast<std::size_t>(ingest_.chunk_length_words(u.session_id));
  publish_requests(
      session(u.session_id)->accept_utterance(u.utterance.utt_seq, std::move(slot), words, now_s()));
}

void Pipeline::handle_summarize_request(const BusMessage& message) {
  auto request = wire::decode_summarize_request(message.payload);
  orchestrator::SummarizeResponse response{request.session_id, request.summary_id,
                                           request.request_seq,
                                           summarizer_->summarize_segment(request.segment_text)};
  bus_->publish(wire::topics::kSummarizeResponse, response.session_id, wire::encode(response));
}

void Pipeline::handle_summarize_response(const BusMessage& message) {
  auto response = wire::decode_summarize_response(message.payload);
  session(response.session_id)->on_summary_response(response, now_s());
}

void Pipeline::dispatch(Stage& stage, const BusMessage& message) {
  {
    std::lock_guard lock(filter_mutex_);
    if (filters_[stage.name].seen(message)) {
      stage.subscription->ack(message);
      return;
    }
  }
  try {
    (this->*stage.handler)(message);
  } catch (const BusShutdownError&) {
    return;
  } catch (const std::exception& e) {
    spdlog::warn("{} stage dropped message {}#{}: {}", stage.name, message.key,
                 message.enqueue_seq, e.what());
  }
  {
    std::lock_guard lock(filter_mutex_);
    filters_[stage.name].mark(message);
  }
  stage.subscription->ack(message);
}

bool Pipeline::pump_once() {
  for (auto& stage : stages_) {
    if (auto message = stage->subscription->try_next()) {
      dispatch(*stage, *message);
      return true;
    }
  }
  return false;
}

std::size_t Pipeline::drain() {
  std::size_t n = 0;
  while (pump_once()) ++n;
  return n;
}

void Pipeline::worker(Stage* stage) {
  while (!stopping_) {
    if (auto message = stage->subscription->next(kWorkerPoll)) dispatch(*stage, *message);
  }
}

void Pipeline::start() {
  if (running_.exchange(true)) return;
  stopping_ = false;
  for (auto& stage : stages_) {
    threads_.emplace_back(&Pipeline::worker, this, stage.get());
    std::size_t extra = stage->name == "asr"          ? options_.asr_workers
                        : stage->name == "summarizer" ? options_.summarizer_workers
                                                      : 1;
    for (std::size_t i = 1; i < extra; ++i) {
      extra_workers_.push_back(std::make_unique<Stage>(
          Stage{stage->name, stage->handler,
                bus_->subscribe(stage->subscription->topic(), stage->subscription->group())}));
      threads_.emplace_back(&Pipeline::worker, this, extra_workers_.back().get());
    }
  }
  threads_.emplace_back([this] {
    while (!stopping_) {
      std::this_thread::sleep_for(kTickInterval);
      try {
        tick();
      } catch (const BusShutdownError&) {
        return;
      }
    }
  });
}

void Pipeline::stop() {
  if (!running_) return;
  stopping_ = true;
  for (auto& t : threads_) t.join();
  threads_.clear();
  extra_workers_.clear();
  running_ = false;
}

bool Pipeline::quiescent(const std::string& session_id) const {
  auto info = ingest_.find(session_id);
  if (!info) throw NotFoundError("no session " + session_id);
  if (!info->closed) return false;
  auto s = session(session_id);
  return s->transcript_complete() && s->summaries_settled();
}

}  // namespace minuteman
