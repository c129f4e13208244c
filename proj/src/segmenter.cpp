#include "minuteman/segmenter.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

#include "minuteman/errors.hpp"

namespace minuteman::segmenter {

namespace {

bool sorts_before(const UtteranceAudio& a, const UtteranceAudio& b) {
  return std::tie(a.end_time_s, a.track_id) < std::tie(b.end_time_s, b.track_id);
}

}  // namespace

bool detect_speech(std::span<const std::int16_t> samples, double threshold_dbfs) {
  return audio::rms_dbfs(samples) >= threshold_dbfs;
}

TrackBuffer::TrackBuffer(std::string session_id, std::string track_id, int max_utterance_s)
    : session_id_(std::move(session_id)),
      track_id_(std::move(track_id)),
      max_chunks_(static_cast<std::size_t>(std::max(max_utterance_s, 1))) {}

UtteranceAudio TrackBuffer::take() {
  UtteranceAudio u;
  u.session_id = session_id_;
  u.track_id = track_id_;
  u.audio = std::move(samples_);
  u.start_time_s = static_cast<double>(speech_start_seq_);
  u.end_time_s = static_cast<double>(speech_start_seq_ + chunk_count_);
  samples_.clear();
  chunk_count_ = 0;
  return u;
}

std::optional<UtteranceAudio> TrackBuffer::advance(const audio::AudioChunk& chunk,
                                                   bool is_speech) {
  if (chunk.chunk_seq != next_seq_) {
    throw SequencingError("track " + track_id_ + " expected chunk " +
                          std::to_string(next_seq_) + ", got " +
                          std::to_string(chunk.chunk_seq));
  }
  ++next_seq_;

  std::optional<UtteranceAudio> emitted;
  if (!is_speech) {
    if (chunk_count_ > 0) emitted = take();
    return emitted;
  }
  if (chunk_count_ >= max_chunks_) emitted = take();
  if (chunk_count_ == 0) speech_start_seq_ = chunk.chunk_seq;
  samples_.insert(samples_.end(), chunk.samples.begin(), chunk.samples.end());
  ++chunk_count_;
  return emitted;
}

std::optional<UtteranceAudio> TrackBuffer::flush() {
  if (chunk_count_ == 0) return std::nullopt;
  return take();
}

std::vector<UtteranceAudio> finalize_order(std::vector<UtteranceAudio> utterances,
                                           std::uint64_t first_seq) {
  std::stable_sort(utterances.begin(), utterances.end(), sorts_before);
  for (auto& u : utterances) u.finalize_seq = first_seq++;
  return utterances;
}

void FinalizeOrder::observe(const TrackBuffer& track) {
  auto& bound = bounds_[track.track_id()];
  if (bound.ended) return;
  // A non-empty buffer can close at the current watermark; an empty one needs
  // at least one more speech chunk first.
  bound.earliest_end = track.watermark() + (track.empty() ? 1 : 0);
}

void FinalizeOrder::add(UtteranceAudio utterance) {
  auto pos = std::upper_bound(held_.begin(), held_.end(), utterance, sorts_before);
  held_.insert(pos, std::move(utterance));
}

void FinalizeOrder::end_track(const std::string& track_id) { bounds_[track_id].ended = true; }

bool FinalizeOrder::releasable(const UtteranceAudio& u) const {
  for (const auto& [track, bound] : bounds_) {
    if (bound.ended || track == u.track_id) continue;
    auto earliest = static_cast<double>(bound.earliest_end);
    if (earliest < u.end_time_s) return false;
    if (earliest == u.end_time_s && track < u.track_id) return false;
  }
  return true;
}

UtteranceAudio FinalizeOrder::stamp(UtteranceAudio u) {
  u.finalize_seq = next_seq_++;
  return u;
}

std::vector<UtteranceAudio> FinalizeOrder::release() {
  std::vector<UtteranceAudio> out;
  std::size_t n = 0;
  while (n < held_.size() && releasable(held_[n])) ++n;
  for (std::size_t i = 0; i < n; ++i) out.push_back(stamp(std::move(held_[i])));
  held_.erase(held_.begin(), held_.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

std::vector<UtteranceAudio> FinalizeOrder::release_all() {
  std::vector<UtteranceAudio> out;
  for (auto& u : held_) out.push_back(stamp(std::move(u)));
  held_.clear();
  return out;
}

SessionSegmenter::SessionSegmenter(std::string session_id,
                                   std::shared_ptr<const VoiceDetector> vad,
                                   int max_utterance_s)
    : session_id_(std::move(session_id)),
      vad_(std::move(vad)),
      max_utterance_s_(max_utterance_s) {
  if (!vad_) vad_ = std::make_shared<EnergyVad>();
}

TrackBuffer& SessionSegmenter::buffer_for(const std::string& track_id) {
  auto it = tracks_.find(track_id);
  if (it == tracks_.end()) {
    it = tracks_.emplace(track_id, TrackBuffer(session_id_, track_id, max_utterance_s_)).first;
  }
  return it->second;
}

std::vector<UtteranceAudio> SessionSegmenter::process(const audio::AudioChunk& chunk) {
  auto& buffer = buffer_for(chunk.track_id);
  auto emitted = buffer.advance(chunk, vad_->is_speech(chunk.samples));
  if (emitted) order_.add(std::move(*emitted));
  order_.observe(buffer);
  return order_.release();
}

std::vector<UtteranceAudio> SessionSegmenter::end_track(const std::string& track_id) {
  auto& buffer = buffer_for(track_id);
  if (auto emitted = buffer.flush()) order_.add(std::move(*emitted));
  order_.end_track(track_id);
  return order_.release();
}

std::vector<UtteranceAudio> SessionSegmenter::finish() {
  for (auto& [track_id, buffer] : tracks_) {
    if (auto emitted = buffer.flush()) order_.add(std::move(*emitted));
    order_.end_track(track_id);
  }
  return order_.release_all();
}

}  // namespace minuteman::segmenter
