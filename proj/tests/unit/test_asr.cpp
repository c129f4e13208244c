#include <doctest.h>

#include <stdexcept>

#include "minuteman/asr_client.hpp"

using namespace minuteman;

namespace {

segmenter::UtteranceAudio audio_of(std::int16_t value, std::size_t chunks = 1) {
  segmenter::UtteranceAudio u;
  u.session_id = "s1";
  u.track_id = "t1";
  u.audio.assign(chunks * audio::kChunkSamples, value);
  u.end_time_s = static_cast<double>(chunks);
  return u;
}

class FailingAsr : public asr::AsrBackend {
 public:
  explicit FailingAsr(int failures, std::string text = "ok") : failures_(failures), text_(std::move(text)) {}
  std::string transcribe(const segmenter::UtteranceAudio&) override {
    ++calls;
    if (calls <= failures_) throw std::runtime_error("backend down");
    return text_;
  }
  int calls = 0;

 private:
  int failures_;
  std::string text_;
};

}  // namespace

TEST_CASE("content hash is sha256 of the pcm bytes") {
  // SHA-256 of 4 zero bytes.
  std::vector<std::int16_t> zeros(2, 0);
  CHECK(asr::content_hash(zeros) ==
        "df3f619804a92fdb4057192dc43dd748ea778adc52bc498ce80524c014b81119");
  CHECK(asr::content_hash(zeros).size() == 64);
}

TEST_CASE("mock asr looks up the content hash") {
  auto h1 = audio_of(100);
  auto h2 = audio_of(200);
  asr::MockAsr mock({{asr::content_hash(h1.audio),
                      "a different DHCP server named care so we can try it"}});
  CHECK(mock.transcribe(h1) == "a different DHCP server named care so we can try it");
  CHECK(mock.transcribe(h1) == mock.transcribe(h1));
  auto unknown = mock.transcribe(h2);
  CHECK(unknown == "UNKNOWN-" + asr::content_hash(h2.audio).substr(0, 8));
}

TEST_CASE("transcripts are single trimmed lines") {
  CHECK(asr::normalize_transcript("  hello\nworld \r\n") == "hello world");
  CHECK(asr::normalize_transcript("   ") == "");
  CHECK(asr::normalize_transcript("") == "");
}

TEST_CASE("transcriber retries then succeeds") {
  auto backend = std::make_shared<FailingAsr>(2, " fine\n");
  std::vector<std::chrono::milliseconds> sleeps;
  asr::Transcriber t(backend, RetryPolicy{}, [&](auto d) { sleeps.push_back(d); });
  CHECK(t.transcribe(audio_of(1)) == "fine");
  CHECK(backend->calls == 3);
  REQUIRE(sleeps.size() == 2);
  CHECK(sleeps[0].count() == 200);
  CHECK(sleeps[1].count() == 400);
}

TEST_CASE("transcriber gives the failure sentinel after three retries") {
  auto backend = std::make_shared<FailingAsr>(100);
  asr::Transcriber t(backend, RetryPolicy{}, [](auto) {});
  CHECK(t.transcribe(audio_of(1)) == asr::kFailedSentinel);
  CHECK(backend->calls == 4);
}

TEST_CASE("silent audio mapped to empty text stays empty") {
  auto silence = audio_of(0);
  auto backend = std::make_shared<asr::MockAsr>(
      std::map<std::string, std::string>{{asr::content_hash(silence.audio), ""}});
  asr::Transcriber t(backend, RetryPolicy{}, [](auto) {});
  CHECK(t.transcribe(silence).empty());
}

TEST_CASE("backend selection") {
  CHECK(dynamic_cast<asr::MockAsr*>(asr::make_backend("mock:").get()));
  CHECK(dynamic_cast<asr::HttpAsr*>(asr::make_backend("http://localhost:9").get()));
}

TEST_CASE("resequencer releases in utt_seq order") {
  asr::Resequencer r;
  auto u = [](std::uint64_t seq) {
    asr::Utterance x;
    x.utt_seq = seq;
    x.text = "u" + std::to_string(seq);
    return x;
  };
  CHECK(r.offer(2, u(2)).empty());
  CHECK(r.offer(4, u(4)).empty());
  CHECK(r.held() == 2);
  auto out = r.offer(1, u(1));
  REQUIRE(out.size() == 2);
  CHECK(out[0].utt_seq == 1);
  CHECK(out[1].utt_seq == 2);
  // A discarded slot unblocks later ones.
  out = r.offer(3, std::nullopt);
  REQUIRE(out.size() == 2);
  CHECK_FALSE(out[0].utterance);
  CHECK(out[1].utterance->text == "u4");
  // Duplicates are ignored.
  CHECK(r.offer(2, u(2)).empty());
  CHECK(r.offer(4, u(4)).empty());
  CHECK(r.next_expected() == 5);
}
