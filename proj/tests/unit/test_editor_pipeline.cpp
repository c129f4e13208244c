#include <doctest.h>

#include <atomic>
#include <mutex>
#include <thread>

#include "minuteman/editor_session.hpp"
#include "minuteman/errors.hpp"
#include "minuteman/pipeline.hpp"
#include "minuteman/replay.hpp"
#include "minuteman/text.hpp"
#include "minuteman/wire.hpp"

using namespace minuteman;
using nlohmann::json;
using doc::Component;

namespace {

asr::Utterance utt(std::uint64_t seq, std::string text, std::string speaker = "A") {
  return {seq, "t1", std::move(speaker), std::move(text), static_cast<double>(seq - 1),
          static_cast<double>(seq)};
}

std::string words(std::size_t n) {
  std::vector<std::string> w;
  for (std::size_t i = 0; i < n; ++i) w.push_back("w" + std::to_string(i));
  return text::join(w, " ");
}

}  // namespace

TEST_CASE("joining a fresh session gives two empty snapshots") {
  editor::EditorSession s("s1", 2.0, {});
  auto joined = s.join([](const json&) {});
  REQUIRE(joined.initial.size() == 4);
  CHECK(joined.initial[0].at("type") == "snapshot");
  CHECK(joined.initial[0].at("doc_id") == "transcript");
  CHECK(joined.initial[0].at("revision") == 0);
  CHECK(joined.initial[0].at("lines").empty());
  CHECK(joined.initial[1].at("doc_id") == "summary");
  CHECK(joined.initial[1].at("revision") == 0);
  CHECK(joined.initial[2].at("type") == "points");
  CHECK(joined.initial[3] == json{{"type", "debug"}, {"enabled", false}});
}

TEST_CASE("listeners get every edit with consecutive revisions") {
  editor::EditorSession s("s1", 2.0, {});
  std::vector<json> a;
  std::vector<json> b;
  s.join([&](const json& m) { a.push_back(m); });
  s.accept_utterance(1, utt(1, "hello"), 100, 0);
  auto jb = s.join([&](const json& m) { b.push_back(m); });
  CHECK(jb.initial[0].at("revision") == 1);
  s.accept_utterance(2, utt(2, "again"), 100, 0);
  s.apply_user_edit({"transcript", 2, "u#1", {Component::insert("X"), Component::retain(19)}}, 1);

  auto revisions = [](const std::vector<json>& msgs) {
    std::vector<std::uint64_t> out;
    for (const auto& m : msgs) {
      if (m.at("type") == "edit-applied" && m.at("doc_id") == "transcript") out.push_back(m.at("revision"));
    }
    return out;
  };
  CHECK(revisions(a) == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(revisions(b) == std::vector<std::uint64_t>{2, 3});
  CHECK(s.text("transcript") == "XA:  hello\nA:  again");
}

TEST_CASE("rest text equals replaying the streamed ops onto the join snapshot") {
  editor::EditorSession s("s1", 2.0, {});
  s.accept_utterance(1, utt(1, "one"), 100, 0);
  std::vector<doc::Line> mirror;
  std::uint64_t revision = 0;
  auto joined = s.join([&](const json& m) {
    if (m.at("type") != "edit-applied" || m.at("doc_id") != "transcript") return;
    CHECK(m.at("revision") == revision + 1);
    revision = m.at("revision");
    mirror = doc::apply(mirror, wire::components_from_json(m.at("components")), m.at("author").get<std::string>()).lines;
  });
  for (const auto& l : joined.initial[0].at("lines")) {
    doc::Line line;
    line.text = l.at("text");
    line.attrs = wire::attrs_from_json(l.at("attrs"));
    mirror.push_back(line);
  }
  revision = joined.initial[0].at("revision");
  s.accept_utterance(2, utt(2, "two"), 100, 0);
  s.apply_user_edit({"transcript", 1, "u#1", {Component::retain(3), Component::insert("!"), Component::retain(4)}}, 0);
  s.accept_utterance(3, utt(3, "three"), 100, 0);
  CHECK(doc::join_lines(mirror) == s.text("transcript"));
}

TEST_CASE("editor session rejects reserved and unknown targets") {
  editor::EditorSession s("s1", 2.0, {});
  CHECK_THROWS_AS(s.apply_user_edit({"transcript", 0, "system", {Component::insert("x")}}, 0),
                  ValidationError);
  CHECK_THROWS_AS(s.apply_user_edit({"transcript", 0, "", {Component::insert("x")}}, 0),
                  ValidationError);
  CHECK_THROWS_AS(s.apply_user_edit({"minutes", 0, "u", {Component::insert("x")}}, 0),
                  NotFoundError);
  CHECK_THROWS_AS(s.apply_user_edit({"transcript", 0, "u", {Component::retain(4)}}, 0),
                  MalformedEditError);
}

TEST_CASE("debug flag is broadcast and toggles back") {
  editor::EditorSession s("s1", 2.0, {});
  std::vector<json> got;
  s.join([&](const json& m) { got.push_back(m); });
  s.set_debug(true);
  CHECK(s.debug());
  s.set_debug(false);
  CHECK_FALSE(s.debug());
  REQUIRE(got.size() == 2);
  CHECK(got[0] == json{{"type", "debug"}, {"enabled", true}});
  CHECK(got[1] == json{{"type", "debug"}, {"enabled", false}});
}

TEST_CASE("out-of-order and discarded utterances") {
  std::vector<Event> events;
  editor::EditorSession s("s1", 2.0, [&](const Event& e) { events.push_back(e); });
  s.accept_utterance(2, utt(2, "two"), 100, 0);
  CHECK(s.text("transcript").empty());
  s.accept_utterance(1, std::nullopt, 100, 0);
  CHECK(s.text("transcript") == "A:  two");
  s.set_last_utterance(2);
  CHECK(s.transcript_complete());
  REQUIRE(events.size() == 2);
  CHECK(events[0].type == "discard");
  CHECK(events[1].type == "append");
}

TEST_CASE("auto trigger and points broadcast") {
  editor::EditorSession s("s1", 2.0, {});
  std::vector<json> points;
  s.join([&](const json& m) {
    if (m.at("type") == "points") points.push_back(m);
  });
  auto requests = s.accept_utterance(1, utt(1, words(9)), 10, 0);
  REQUIRE(requests.size() == 1);
  CHECK(s.text("summary") == orchestrator::kPlaceholder);
  REQUIRE_FALSE(points.empty());
  CHECK(points.back().at("points")[0].at("state") == "pending");
  s.on_summary_response({"s1", 1, 1, "done"}, 0);
  CHECK(points.back().at("points")[0].at("state") == "generated");
  CHECK(s.summaries_settled());
}

// --- pipeline ---------------------------------------------------------------

namespace {

struct ScriptedMeeting {
  std::shared_ptr<ManualClock> clock = std::make_shared<ManualClock>();
  std::vector<Event> events;
  std::unique_ptr<Pipeline> pipeline;
  std::map<std::string, std::vector<std::vector<std::int16_t>>> tracks;

  /// `pattern` per track: one char per second, '.' silence, anything else
  /// speech.
  ScriptedMeeting(std::map<std::string, std::string> patterns,
                  std::map<std::string, std::string> texts_by_track_and_start) {
    std::map<std::string, std::string> table;
    std::size_t index = 0;
    for (const auto& [track, pattern] : patterns) {
      auto& chunks = tracks[track];
      std::vector<std::int16_t> current;
      std::size_t start = 0;
      for (std::size_t i = 0; i <= pattern.size(); ++i) {
        bool speech = i < pattern.size() && pattern[i] != '.';
        if (i < pattern.size()) {
          chunks.push_back(speech ? replay::synth_chunk(1, index, i)
                                  : std::vector<std::int16_t>(audio::kChunkSamples, 0));
        }
        if (speech) {
          if (current.empty()) start = i;
          current.insert(current.end(), chunks.back().begin(), chunks.back().end());
        } else if (!current.empty()) {
          auto key = track + "@" + std::to_string(start);
          auto it = texts_by_track_and_start.find(key);
          table[asr::content_hash(current)] = it == texts_by_track_and_start.end() ? "" : it->second;
          current.clear();
        }
      }
      ++index;
    }
    PipelineOptions options;
    options.clock = clock;
    options.asr_backend = std::make_shared<asr::MockAsr>(table);
    options.on_event = [this](const Event& e) { events.push_back(e); };
    options.debounce_s = 2.0;
    pipeline = std::make_unique<Pipeline>(options);
  }

  std::string run(int words_per_point = 10) {
    auto sid = pipeline->create_session(words_per_point).session_id;
    std::size_t length = tracks.begin()->second.size();
    for (std::size_t i = 0; i < length; ++i) {
      clock->set(static_cast<double>(i + 1));
      for (const auto& [track, chunks] : tracks) {
        pipeline->ingest_chunk(sid, track, i, audio::encode_pcm(chunks[i]));
      }
      pipeline->drain();
    }
    pipeline->close_session(sid);
    pipeline->drain();
    return sid;
  }

  std::size_t count(const std::string& type) const {
    std::size_t n = 0;
    for (const auto& e : events) n += e.type == type;
    return n;
  }
};

}  // namespace

TEST_CASE("pipeline orders utterances by end time with track tie-break") {
  ScriptedMeeting m({{"t1", "SSS...S."}, {"t2", ".SS..SS."}},
                    {{"t1@0", "first speaker long"}, {"t2@1", "second"}, {"t1@6", "late one"},
                     {"t2@5", "tie"}});
  auto sid = m.run(1000);
  CHECK(m.pipeline->session(sid)->text("transcript") ==
        "t1:  first speaker long\nt2:  second\nt1:  late one\nt2:  tie");
  CHECK(m.pipeline->quiescent(sid));
}

TEST_CASE("pipeline discards empty transcriptions and uses speaker names") {
  ScriptedMeeting m({{"t1", "SS..S.SS."}}, {{"t1@0", "hello there"}, {"t1@6", "bye"}});
  auto sid = m.pipeline->create_session(1000).session_id;
  m.pipeline->register_speaker(sid, "t1", "Vojta");
  const auto& chunks = m.tracks["t1"];
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    m.pipeline->ingest_chunk(sid, "t1", i, audio::encode_pcm(chunks[i]));
  }
  m.pipeline->close_session(sid);
  m.pipeline->drain();
  CHECK(m.pipeline->session(sid)->text("transcript") == "Vojta:  hello there\nVojta:  bye");
  CHECK(m.count("discard") == 1);
  CHECK(m.pipeline->quiescent(sid));
}

TEST_CASE("pipeline summarizes at the threshold and settles") {
  ScriptedMeeting m({{"t1", "SS.SS.SS."}},
                    {{"t1@0", "we need a different DHCP server"},
                     {"t1@3", "named Kea so we can try it"},
                     {"t1@6", "I will install it tomorrow"}});
  auto sid = m.run(15);
  auto s = m.pipeline->session(sid);
  CHECK(m.count("trigger") == 1);
  CHECK(s->text("summary") == "t1 discuss: need different DHCP server named Kea try");
  CHECK(m.pipeline->quiescent(sid));
}

TEST_CASE("pipeline edits route to the orchestrator") {
  ScriptedMeeting m({{"t1", "SS.SS."}}, {{"t1@0", "a b c d e f g h i"}, {"t1@3", "j k l"}});
  auto sid = m.run(10);
  auto s = m.pipeline->session(sid);
  REQUIRE(m.count("trigger") == 1);
  auto before = s->text("summary");
  m.clock->set(100);
  m.pipeline->apply_edit(sid, {"transcript", s->inspect([](auto& t, auto&, auto&) { return t.revision(); }), "u#1",
                               {Component::retain(4), Component::insert("Z"),
                                Component::retain(doc::text_length(s->inspect([](auto& t, auto&, auto&) { return t.lines(); })) - 4)}});
  CHECK_FALSE(m.pipeline->quiescent(sid));
  m.clock->set(101);
  m.pipeline->tick();
  CHECK(m.count("resummarize") == 0);
  m.clock->set(102);
  m.pipeline->tick();
  m.pipeline->drain();
  CHECK(m.count("resummarize") == 1);
  CHECK(s->text("summary") != before);
  CHECK(m.pipeline->quiescent(sid));

  m.pipeline->request_summary(sid, {2, 2});
  m.pipeline->drain();
  CHECK(s->text("summary").find('\n') != std::string::npos);
  CHECK_THROWS_AS(m.pipeline->request_summary(sid, {2, 1}), ValidationError);
  CHECK_THROWS_AS(m.pipeline->request_summary("s99", {1, 1}), NotFoundError);
}

TEST_CASE("redelivered utterance text appends once") {
  ScriptedMeeting m({{"t1", "SS."}}, {{"t1@0", "only once"}});
  auto sid = m.run(1000);
  wire::UtteranceText dup{sid, {1, "t1", "t1", "only once", 0, 2}};
  m.pipeline->bus().publish(wire::topics::kUtteranceText, sid, wire::encode(dup));
  m.pipeline->drain();
  CHECK(m.pipeline->session(sid)->text("transcript") == "t1:  only once");
}

TEST_CASE("pipeline config events and unknown sessions") {
  ScriptedMeeting m({{"t1", "."}}, {});
  auto sid = m.pipeline->create_session().session_id;
  m.pipeline->set_chunk_length(sid, 50);
  CHECK(m.count("config") == 1);
  CHECK_THROWS_AS(m.pipeline->session("nope"), NotFoundError);
  CHECK_THROWS_AS(m.pipeline->quiescent("nope"), NotFoundError);
  CHECK_FALSE(m.pipeline->quiescent(sid));
  m.pipeline->close_session(sid);
  m.pipeline->drain();
  CHECK(m.pipeline->quiescent(sid));
  CHECK(m.pipeline->session(sid)->text("transcript").empty());
}

TEST_CASE("threaded pipeline reaches the same transcript") {
  ScriptedMeeting m({{"t1", "SSS...S."}, {"t2", ".SS..SS."}},
                    {{"t1@0", "first speaker long"}, {"t2@1", "second"}, {"t1@6", "late one"},
                     {"t2@5", "tie"}});
  m.pipeline->start();
  CHECK(m.pipeline->running());
  auto sid = m.pipeline->create_session(1000).session_id;
  for (std::size_t i = 0; i < 8; ++i) {
    for (const auto& [track, chunks] : m.tracks) {
      m.pipeline->ingest_chunk(sid, track, i, audio::encode_pcm(chunks[i]));
    }
  }
  m.pipeline->close_session(sid);
  for (int i = 0; i < 500 && !m.pipeline->quiescent(sid); ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  CHECK(m.pipeline->quiescent(sid));
  m.pipeline->stop();
  CHECK(m.pipeline->session(sid)->text("transcript") ==
        "t1:  first speaker long\nt2:  second\nt1:  late one\nt2:  tie");
}

TEST_CASE("joining under load leaves no gap between snapshot and stream") {
  editor::EditorSession s("s1", 2.0, {});
  std::atomic<bool> stop{false};
  std::thread writer([&] {
    for (std::uint64_t seq = 1; !stop; ++seq) s.accept_utterance(seq, utt(seq, "x"), 100000, 0);
  });
  for (int i = 0; i < 50; ++i) {
    std::mutex m;
    std::vector<std::uint64_t> revisions;
    auto joined = s.join([&](const json& msg) {
      if (msg.at("type") != "edit-applied" || msg.at("doc_id") != "transcript") return;
      std::lock_guard lock(m);
      revisions.push_back(msg.at("revision"));
    });
    const std::uint64_t base = joined.initial[0].at("revision");
    while (true) {
      std::lock_guard lock(m);
      if (!revisions.empty()) break;
    }
    s.leave(joined.listener_id);
    std::lock_guard lock(m);
    CHECK(revisions.front() == base + 1);
    for (std::size_t k = 1; k < revisions.size(); ++k) CHECK(revisions[k] == revisions[k - 1] + 1);
  }
  stop = true;
  writer.join();
}
