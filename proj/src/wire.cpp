#include "minuteman/wire.hpp"

#include "minuteman/errors.hpp"

namespace minuteman::wire {

using nlohmann::json;

namespace {

// Binary payloads: one JSON header line, then raw PCM.
std::string framed(const json& header, std::span<const std::int16_t> samples) {
  std::string out = header.dump();
  out.push_back('\n');
  out += audio::encode_pcm(samples);
  return out;
}

std::pair<json, std::string_view> unframe(std::string_view payload) {
  auto nl = payload.find('\n');
  if (nl == std::string_view::npos) throw FormatError("audio payload lacks a header");
  return {json::parse(payload.substr(0, nl)), payload.substr(nl + 1)};
}

json parse_json(std::string_view payload) {
  try {
    return json::parse(payload);
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed message: ") + e.what());
  }
}

}  // namespace

std::string track_key(std::string_view session_id, std::string_view track_id) {
  std::string key(session_id);
  key.push_back(':');
  key += track_id;
  return key;
}

std::string encode(const audio::AudioChunk& chunk) {
  return framed(json{{"type", "chunk"},
                     {"session", chunk.session_id},
                     {"track", chunk.track_id},
                     {"seq", chunk.chunk_seq}},
                chunk.samples);
}

std::string encode(const TrackEnd& end) {
  return framed(json{{"type", "track-end"},
                     {"session", end.session_id},
                     {"track", end.track_id},
                     {"tracks", end.session_tracks}},
                {});
}

AudioMessage decode_audio_message(std::string_view payload) {
  auto [header, body] = unframe(payload);
  if (header.at("type") == "track-end") {
    return TrackEnd{header.at("session"), header.at("track"),
                    header.at("tracks").get<std::vector<std::string>>()};
  }
  audio::AudioChunk chunk;
  chunk.session_id = header.at("session");
  chunk.track_id = header.at("track");
  chunk.chunk_seq = header.at("seq");
  chunk.samples = audio::decode_chunk_payload(body);
  return chunk;
}

std::string encode(const segmenter::UtteranceAudio& u) {
  return framed(json{{"type", "utterance"},
                     {"session", u.session_id},
                     {"track", u.track_id},
                     {"start", u.start_time_s},
                     {"end", u.end_time_s},
                     {"finalize_seq", u.finalize_seq}},
                u.audio);
}

std::string encode_utterance_audio_end(const SessionEnd& end) {
  return framed(json{{"type", "session-end"}, {"session", end.session_id}, {"last_seq", end.last_seq}},
                {});
}

UtteranceAudioMessage decode_utterance_audio(std::string_view payload) {
  auto [header, body] = unframe(payload);
  if (header.at("type") == "session-end") {
    return SessionEnd{header.at("session"), header.at("last_seq")};
  }
  segmenter::UtteranceAudio u;
  u.session_id = header.at("session");
  u.track_id = header.at("track");
  u.start_time_s = header.at("start");
  u.end_time_s = header.at("end");
  u.finalize_seq = header.at("finalize_seq");
  u.audio = audio::decode_pcm(body);
  return u;
}

std::string encode(const UtteranceText& u) {
  return json{{"type", "utterance"},
              {"session", u.session_id},
              {"utt_seq", u.utterance.utt_seq},
              {"track", u.utterance.track_id},
              {"speaker", u.utterance.speaker_label},
              {"text", u.utterance.text},
              {"start", u.utterance.start_time_s},
              {"end", u.utterance.end_time_s}}
      .dump();
}

std::string encode_utterance_text_end(const SessionEnd& end) {
  return json{{"type", "session-end"}, {"session", end.session_id}, {"last_seq", end.last_seq}}
      .dump();
}

UtteranceTextMessage decode_utterance_text(std::string_view payload) {
  auto j = parse_json(payload);
  if (j.at("type") == "session-end") return SessionEnd{j.at("session"), j.at("last_seq")};
  UtteranceText u;
  u.session_id = j.at("session");
  u.utterance.utt_seq = j.at("utt_seq");
  u.utterance.track_id = j.at("track");
  u.utterance.speaker_label = j.at("speaker");
  u.utterance.text = j.at("text");
  u.utterance.start_time_s = j.at("start");
  u.utterance.end_time_s = j.at("end");
  return u;
}

std::string encode(const orchestrator::SummarizeRequest& r) {
  return json{{"session", r.session_id},
              {"summary_id", r.summary_id},
              {"request_seq", r.request_seq},
              {"segment_text", r.segment_text}}
      .dump();
}

orchestrator::SummarizeRequest decode_summarize_request(std::string_view payload) {
  auto j = parse_json(payload);
  return {j.at("session"), j.at("summary_id"), j.at("request_seq"), j.at("segment_text")};
}

std::string encode(const orchestrator::SummarizeResponse& r) {
  return json{{"session", r.session_id},
              {"summary_id", r.summary_id},
              {"request_seq", r.request_seq},
              {"summary_text", r.summary_text}}
      .dump();
}

orchestrator::SummarizeResponse decode_summarize_response(std::string_view payload) {
  auto j = parse_json(payload);
  return {j.at("session"), j.at("summary_id"), j.at("request_seq"), j.at("summary_text")};
}

json to_json(const doc::LineAttrs& attrs) {
  json j = json::object();
  if (attrs.utt_seq) j["utt_seq"] = *attrs.utt_seq;
  if (attrs.summary_id) j["summary_id"] = *attrs.summary_id;
  return j;
}

doc::LineAttrs attrs_from_json(const json& j) {
  doc::LineAttrs attrs;
  if (!j.is_object()) return attrs;
  if (auto it = j.find("utt_seq"); it != j.end() && it->is_number_unsigned()) {
    attrs.utt_seq = it->get<std::uint64_t>();
  }
  if (auto it = j.find("summary_id"); it != j.end() && it->is_number_unsigned()) {
    attrs.summary_id = it->get<std::uint64_t>();
  }
  return attrs;
}

json to_json(const doc::Components& components) {
  json out = json::array();
  for (const auto& c : components) {
    switch (c.kind) {
      case doc::ComponentKind::kRetain:
        out.push_back({{"retain", c.count}});
        break;
      case doc::ComponentKind::kDelete:
        out.push_back({{"delete", c.count}});
        break;
      case doc::ComponentKind::kInsert: {
        json item{{"insert", c.text}};
        if (!c.attrs.empty()) item["attrs"] = to_json(c.attrs);
        out.push_back(std::move(item));
        break;
      }
    }
  }
  return out;
}

doc::Components components_from_json(const json& j) {
  if (!j.is_array()) throw MalformedEditError("components must be an array");
  doc::Components out;
  for (const auto& item : j) {
    if (!item.is_object()) throw MalformedEditError("component must be an object");
    if (auto it = item.find("retain"); it != item.end() && it->is_number_unsigned()) {
      out.push_back(doc::Component::retain(it->get<std::size_t>()));
    } else if (auto it = item.find("delete"); it != item.end() && it->is_number_unsigned()) {
      out.push_back(doc::Component::erase(it->get<std::size_t>()));
    } else if (auto it = item.find("insert"); it != item.end() && it->is_string()) {
      doc::LineAttrs attrs;
      if (auto a = item.find("attrs"); a != item.end()) attrs = attrs_from_json(*a);
      out.push_back(doc::Component::insert(it->get<std::string>(), attrs));
    } else {
      throw MalformedEditError("unknown component " + item.dump());
    }
  }
  return out;
}

json snapshot_json(const doc::LineDoc& d) {
  json lines = json::array();
  for (const auto& line : d.lines()) {
    lines.push_back({{"text", line.text}, {"attrs", to_json(line.attrs)}, {"author", line.author}});
  }
  return json{{"type", "snapshot"}, {"doc_id", d.id()}, {"revision", d.revision()}, {"lines", lines}};
}

json edit_applied_json(const doc::LineDoc::Applied& applied) {
  return json{{"type", "edit-applied"},
              {"doc_id", applied.op.doc_id},
              {"revision", applied.revision},
              {"components", to_json(applied.op.components)},
              {"author", applied.op.author}};
}

json to_json(const orchestrator::SummaryPoint& p) {
  return json{{"summary_id", p.summary_id},
              {"kind", orchestrator::to_string(p.kind)},
              {"start_seq", p.range.start_seq},
              {"end_seq", p.range.end_seq},
              {"state", orchestrator::to_string(p.state)},
              {"text", p.text},
              {"request_seq", p.request_seq}};
}

}  // namespace minuteman::wire
