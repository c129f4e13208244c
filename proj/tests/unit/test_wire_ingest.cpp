#include <doctest.h>

#include "minuteman/audio_ingest.hpp"
#include "minuteman/errors.hpp"
#include "minuteman/wire.hpp"

using namespace minuteman;
using nlohmann::json;

TEST_CASE("audio messages round trip") {
  audio::AudioChunk c{"s1", "t1", 4, std::vector<std::int16_t>(audio::kChunkSamples, -7)};
  auto back = std::get<audio::AudioChunk>(wire::decode_audio_message(wire::encode(c)));
  CHECK(back.session_id == "s1");
  CHECK(back.track_id == "t1");
  CHECK(back.chunk_seq == 4);
  CHECK(back.samples == c.samples);

  wire::TrackEnd end{"s1", "t2", {"t1", "t2"}};
  auto e = std::get<wire::TrackEnd>(wire::decode_audio_message(wire::encode(end)));
  CHECK(e.track_id == "t2");
  CHECK(e.session_tracks == std::vector<std::string>{"t1", "t2"});
  CHECK_THROWS_AS(wire::decode_audio_message("no header"), FormatError);
}

TEST_CASE("utterance messages round trip") {
  segmenter::UtteranceAudio u{"s1", "t1", std::vector<std::int16_t>(32000, 3), 2, 4, 9};
  auto back = std::get<segmenter::UtteranceAudio>(wire::decode_utterance_audio(wire::encode(u)));
  CHECK(back.audio == u.audio);
  CHECK(back.finalize_seq == 9);
  CHECK(back.end_time_s == 4);
  auto end = std::get<wire::SessionEnd>(
      wire::decode_utterance_audio(wire::encode_utterance_audio_end({"s1", 12})));
  CHECK(end.last_seq == 12);

  wire::UtteranceText t{"s1", {3, "t1", "Vojta", "hello", 1.5, 3}};
  auto tb = std::get<wire::UtteranceText>(wire::decode_utterance_text(wire::encode(t)));
  CHECK(tb.utterance.utt_seq == 3);
  CHECK(tb.utterance.speaker_label == "Vojta");
  CHECK(tb.utterance.text == "hello");
  CHECK(std::holds_alternative<wire::SessionEnd>(
      wire::decode_utterance_text(wire::encode_utterance_text_end({"s1", 3}))));
  CHECK_THROWS_AS(wire::decode_utterance_text("{"), FormatError);
}

TEST_CASE("summarize messages carry the documented fields") {
  orchestrator::SummarizeRequest r{"s1", 2, 5, "A:  text"};
  auto j = json::parse(wire::encode(r));
  CHECK(j == json{{"session", "s1"}, {"summary_id", 2}, {"request_seq", 5}, {"segment_text", "A:  text"}});
  auto back = wire::decode_summarize_request(j.dump());
  CHECK(back.segment_text == "A:  text");

  orchestrator::SummarizeResponse resp{"s1", 2, 5, "summary"};
  auto rj = json::parse(wire::encode(resp));
  CHECK(rj.at("summary_text") == "summary");
  CHECK(wire::decode_summarize_response(rj.dump()).request_seq == 5);
}

TEST_CASE("component json") {
  doc::Components c{doc::Component::retain(3), doc::Component::insert("x", {7, {}}),
                    doc::Component::erase(2), doc::Component::insert("y")};
  auto j = wire::to_json(c);
  CHECK(j == json::parse(R"([{"retain":3},{"insert":"x","attrs":{"utt_seq":7}},{"delete":2},{"insert":"y"}])"));
  CHECK(wire::components_from_json(j) == c);
  CHECK_THROWS_AS(wire::components_from_json(json::object()), MalformedEditError);
  CHECK_THROWS_AS(wire::components_from_json(json::parse(R"([{"retain":-1}])")), MalformedEditError);
  CHECK_THROWS_AS(wire::components_from_json(json::parse(R"([{"move":1}])")), MalformedEditError);
  CHECK_THROWS_AS(wire::components_from_json(json::parse(R"([5])")), MalformedEditError);
}

TEST_CASE("snapshot json") {
  doc::LineDoc d("transcript");
  d.append_utterance({1, "t1", "A", "hi", 0, 1});
  auto s = wire::snapshot_json(d);
  CHECK(s.at("type") == "snapshot");
  CHECK(s.at("revision") == 1);
  CHECK(s.at("lines") == json::parse(R"([{"text":"A:  hi","attrs":{"utt_seq":1},"author":"system"}])"));
}

TEST_CASE("sessions get default and explicit densities") {
  ingest::IngestService svc(EventBus::create());
  CHECK(svc.create_session(100).chunk_length_words == 100);
  auto s = svc.create_session();
  CHECK(s.chunk_length_words == 100);
  CHECK(s.session_id != svc.create_session().session_id);
  CHECK_THROWS_AS(svc.create_session(5), ValidationError);
  CHECK_THROWS_AS(svc.create_session(2001), ValidationError);
  CHECK(svc.create_session(10).chunk_length_words == 10);
  CHECK(svc.create_session(2000).chunk_length_words == 2000);
}

TEST_CASE("chunk ingestion validates and publishes") {
  auto bus = EventBus::create();
  auto sub = bus->subscribe(wire::topics::kAudio, "test");
  ingest::IngestService svc(bus);
  auto sid = svc.create_session().session_id;
  std::string ok(32000, '\0');

  CHECK(svc.ingest_chunk(sid, "t1", 0, ok) == 1);
  CHECK(svc.session(sid).tracks.count("t1") == 1);
  CHECK_THROWS_AS(svc.ingest_chunk(sid, "t1", 1, std::string(31998, '\0')), FormatError);
  CHECK(svc.ingest_chunk(sid, "t1", 1, ok) == 2);
  CHECK_THROWS_AS(svc.ingest_chunk(sid, "t1", 1, ok), SequencingError);
  CHECK_THROWS_AS(svc.ingest_chunk(sid, "t1", 5, ok), SequencingError);
  CHECK_THROWS_AS(svc.ingest_chunk(sid, "t2", 1, ok), SequencingError);
  CHECK_THROWS_AS(svc.ingest_chunk("nope", "t1", 0, ok), NotFoundError);
  CHECK(svc.ingest_chunk(sid, "t2", 0, ok) == 1);

  // Rejected chunks left no trace.
  std::size_t published = 0;
  while (auto m = sub->try_next()) {
    CHECK(m->key.rfind(sid + ":", 0) == 0);
    ++published;
    sub->ack(*m);
  }
  CHECK(published == 3);
}

TEST_CASE("density changes and closing") {
  auto bus = EventBus::create();
  auto sub = bus->subscribe(wire::topics::kAudio, "test");
  ingest::IngestService svc(bus);
  auto sid = svc.create_session().session_id;
  svc.set_chunk_length(sid, 50);
  CHECK(svc.chunk_length_words(sid) == 50);
  svc.set_chunk_length(sid, 50);
  CHECK_THROWS_AS(svc.set_chunk_length(sid, 3), ValidationError);
  svc.ingest_chunk(sid, "t1", 0, std::string(32000, '\0'));
  svc.register_speaker(sid, "t1", "Vojta");
  CHECK(svc.speaker_label(sid, "t1") == "Vojta");
  CHECK(svc.speaker_label(sid, "t9") == "t9");

  svc.close_session(sid);
  CHECK_THROWS_AS(svc.set_chunk_length(sid, 50), NotFoundError);
  CHECK_THROWS_AS(svc.ingest_chunk(sid, "t1", 1, std::string(32000, '\0')), NotFoundError);
  CHECK_THROWS_AS(svc.session(sid), NotFoundError);
  CHECK(svc.find(sid)->closed);
  CHECK(svc.chunk_length_words(sid) == 50);

  sub->ack(*sub->try_next());
  auto end = sub->try_next();
  REQUIRE(end);
  auto msg = std::get<wire::TrackEnd>(wire::decode_audio_message(end->payload));
  CHECK(msg.track_id == "t1");
}
