#include <doctest.h>

#include <cmath>
#include <numbers>

#include "minuteman/audio.hpp"
#include "minuteman/errors.hpp"
#include "minuteman/segmenter.hpp"

using namespace minuteman;

namespace {

std::vector<std::int16_t> tone(double amplitude, double freq = 440.0) {
  std::vector<std::int16_t> s(audio::kChunkSamples);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = static_cast<std::int16_t>(
        std::lround(amplitude * std::sin(2 * std::numbers::pi * freq * i / audio::kSampleRate)));
  }
  return s;
}

audio::AudioChunk chunk(const std::string& track, std::uint64_t seq, bool speech) {
  audio::AudioChunk c{"s1", track, seq, {}};
  c.samples = speech ? tone(8000, 200 + static_cast<double>(seq)) :
                       std::vector<std::int16_t>(audio::kChunkSamples, 0);
  return c;
}

}  // namespace

TEST_CASE("chunk payload must be exactly 32000 bytes") {
  CHECK(audio::decode_chunk_payload(std::string(32000, '\0')).size() == 16000);
  CHECK_THROWS_AS(audio::decode_chunk_payload(std::string(31998, '\0')), FormatError);
  CHECK_THROWS_AS(audio::decode_chunk_payload(std::string(32002, '\0')), FormatError);
  CHECK_THROWS_AS(audio::decode_chunk_payload(""), FormatError);
}

TEST_CASE("pcm is little endian") {
  std::vector<std::int16_t> s{1, -2, 0x1234};
  auto bytes = audio::encode_pcm(s);
  REQUIRE(bytes.size() == 6);
  CHECK(static_cast<unsigned char>(bytes[0]) == 0x01);
  CHECK(static_cast<unsigned char>(bytes[1]) == 0x00);
  CHECK(static_cast<unsigned char>(bytes[2]) == 0xfe);
  CHECK(static_cast<unsigned char>(bytes[3]) == 0xff);
  CHECK(static_cast<unsigned char>(bytes[4]) == 0x34);
  CHECK(static_cast<unsigned char>(bytes[5]) == 0x12);
  CHECK(audio::decode_pcm(bytes) == s);
}

TEST_CASE("wav round trip") {
  auto s = tone(1000);
  auto wav = audio::wav_encode(s);
  CHECK(wav.size() == 44 + s.size() * 2);
  CHECK(wav.substr(0, 4) == "RIFF");
  auto back = audio::wav_decode(wav);
  CHECK(back.sample_rate == 16000);
  CHECK(back.channels == 1);
  CHECK(back.samples == s);
  CHECK_THROWS_AS(audio::wav_decode("not a wav file at all, really not"), FormatError);
}

TEST_CASE("rms level") {
  std::vector<std::int16_t> silence(16000, 0);
  CHECK(std::isinf(audio::rms_dbfs(silence)));
  std::vector<std::int16_t> square(16000);
  for (std::size_t i = 0; i < square.size(); ++i) square[i] = i % 2 ? 16384 : -16384;
  CHECK(audio::rms_dbfs(square) == doctest::Approx(20 * std::log10(0.5)).epsilon(1e-9));
}

TEST_CASE("energy speech detection") {
  CHECK_FALSE(segmenter::detect_speech(std::vector<std::int16_t>(16000, 0)));
  CHECK(segmenter::detect_speech(tone(32767)));

  auto amplitude_for = [](double dbfs) { return 32768.0 * std::pow(10.0, dbfs / 20.0) * std::sqrt(2.0); };
  CHECK_FALSE(segmenter::detect_speech(tone(amplitude_for(-41.0))));
  CHECK(segmenter::detect_speech(tone(amplitude_for(-39.0))));
  // Custom threshold.
  CHECK(segmenter::detect_speech(tone(amplitude_for(-41.0)), -45.0));
  segmenter::EnergyVad vad(-30.0);
  CHECK_FALSE(vad.is_speech(tone(amplitude_for(-35.0))));
}

TEST_CASE("speech, speech, silence gives one two-second utterance") {
  segmenter::TrackBuffer buffer("s1", "t1");
  CHECK_FALSE(buffer.advance(chunk("t1", 0, true), true));
  CHECK_FALSE(buffer.advance(chunk("t1", 1, true), true));
  auto u = buffer.advance(chunk("t1", 2, false), false);
  REQUIRE(u);
  CHECK(u->start_time_s == 0.0);
  CHECK(u->end_time_s == 2.0);
  CHECK(u->chunk_count() == 2);
  CHECK(u->track_id == "t1");
  CHECK(u->finalize_seq == 0);
  CHECK(buffer.empty());
}

TEST_CASE("silence alone emits nothing") {
  segmenter::TrackBuffer buffer("s1", "t1");
  CHECK_FALSE(buffer.advance(chunk("t1", 0, false), false));
  CHECK_FALSE(buffer.advance(chunk("t1", 1, false), false));
  CHECK_FALSE(buffer.flush());
}

TEST_CASE("31 speech chunks force a flush at the 31st") {
  segmenter::TrackBuffer buffer("s1", "t1", 30);
  std::vector<std::int16_t> expected;
  for (std::uint64_t i = 0; i < 30; ++i) {
    auto c = chunk("t1", i, true);
    expected.insert(expected.end(), c.samples.begin(), c.samples.end());
    CHECK_FALSE(buffer.advance(c, true));
  }
  auto u = buffer.advance(chunk("t1", 30, true), true);
  REQUIRE(u);
  CHECK(u->start_time_s == 0.0);
  CHECK(u->end_time_s == 30.0);
  CHECK(u->audio == expected);
  CHECK(buffer.buffered_chunks() == 1);
  auto rest = buffer.flush();
  REQUIRE(rest);
  CHECK(rest->start_time_s == 30.0);
  CHECK(rest->end_time_s == 31.0);
}

TEST_CASE("finalize order sorts by end time, ties by track id") {
  auto utt = [](std::string track, double start, double end) {
    segmenter::UtteranceAudio u;
    u.session_id = "s1";
    u.track_id = std::move(track);
    u.start_time_s = start;
    u.end_time_s = end;
    return u;
  };
  auto out = segmenter::finalize_order({utt("t1", 0, 3), utt("t2", 0, 2)});
  CHECK(out[0].track_id == "t2");
  CHECK(out[0].finalize_seq == 1);
  CHECK(out[1].track_id == "t1");
  CHECK(out[1].finalize_seq == 2);

  out = segmenter::finalize_order({utt("t2", 1, 4), utt("t1", 2, 4)}, 7);
  CHECK(out[0].track_id == "t1");
  CHECK(out[0].finalize_seq == 7);
  CHECK(out[1].track_id == "t2");
  CHECK(out[1].finalize_seq == 8);
}

TEST_CASE("session segmenter orders across tracks regardless of interleaving") {
  auto vad = std::make_shared<segmenter::EnergyVad>();
  // t1 speaks 0-2, t2 speaks 0-1 then 3-4.
  std::vector<bool> t1{true, true, true, false, false, false};
  std::vector<bool> t2{true, false, false, true, false, false};

  auto run = [&](bool t2_first) {
    segmenter::SessionSegmenter seg("s1", vad);
    std::vector<segmenter::UtteranceAudio> out;
    auto take = [&](std::vector<segmenter::UtteranceAudio> v) {
      for (auto& u : v) out.push_back(std::move(u));
    };
    if (t2_first) {
      // Both tracks are known before t2 runs ahead.
      take(seg.process(chunk("t1", 0, t1[0])));
      for (std::uint64_t i = 0; i < t2.size(); ++i) take(seg.process(chunk("t2", i, t2[i])));
      for (std::uint64_t i = 1; i < t1.size(); ++i) take(seg.process(chunk("t1", i, t1[i])));
    } else {
      for (std::uint64_t i = 0; i < t1.size(); ++i) {
        take(seg.process(chunk("t1", i, t1[i])));
        take(seg.process(chunk("t2", i, t2[i])));
      }
    }
    take(seg.end_track("t1"));
    take(seg.end_track("t2"));
    take(seg.finish());
    return out;
  };

  for (bool order : {false, true}) {
    auto out = run(order);
    REQUIRE(out.size() == 3);
    CHECK(out[0].track_id == "t2");
    CHECK(out[0].end_time_s == 1.0);
    CHECK(out[1].track_id == "t1");
    CHECK(out[1].end_time_s == 3.0);
    CHECK(out[2].track_id == "t2");
    CHECK(out[2].end_time_s == 4.0);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i].finalize_seq == i + 1);
  }
}

TEST_CASE("session segmenter rejects out-of-order chunks") {
  segmenter::SessionSegmenter seg("s1", std::make_shared<segmenter::EnergyVad>());
  seg.process(chunk("t1", 0, true));
  CHECK_THROWS_AS(seg.process(chunk("t1", 2, true)), SequencingError);
}

TEST_CASE("end of session flushes buffered speech") {
  segmenter::SessionSegmenter seg("s1", std::make_shared<segmenter::EnergyVad>());
  CHECK(seg.process(chunk("t1", 0, true)).empty());
  CHECK(seg.process(chunk("t1", 1, true)).empty());
  auto out = seg.end_track("t1");
  auto rest = seg.finish();
  out.insert(out.end(), rest.begin(), rest.end());
  REQUIRE(out.size() == 1);
  CHECK(out[0].end_time_s == 2.0);
  CHECK(seg.last_finalize_seq() == 1);
}
