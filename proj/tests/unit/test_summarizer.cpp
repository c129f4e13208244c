#include <doctest.h>

#include <stdexcept>

#include "minuteman/summarizer_client.hpp"

using namespace minuteman;
using namespace minuteman::summarizer;

namespace {

PreprocessConfig fillers_only() {
  auto cfg = PreprocessConfig::defaults();
  cfg.remove_stopwords = false;
  return cfg;
}

class FlakySummarizer : public SummarizerBackend {
 public:
  explicit FlakySummarizer(int failures) : failures_(failures) {}
  std::string summarize(const std::string& text) override {
    ++calls;
    if (calls <= failures_) throw std::runtime_error("down");
    return "summary of\n" + text;
  }
  int calls = 0;

 private:
  int failures_;
};

}  // namespace

TEST_CASE("filler removal keeps the speaker label") {
  CHECK(preprocess("Fanda:  like, adapt this towards check summarization, like", fillers_only()) ==
        "Fanda: adapt this towards check summarization");
}

TEST_CASE("preprocess of empty text") { CHECK(preprocess("", PreprocessConfig::defaults()).empty()); }

TEST_CASE("a line of fillers only is dropped") {
  CHECK(preprocess("um, uh", fillers_only()).empty());
  CHECK(preprocess("A:  um, uh\nB:  real words here", fillers_only()) == "B: real words here");
}

TEST_CASE("fillers match whole words and phrases, case-insensitively") {
  auto cfg = fillers_only();
  CHECK(preprocess("You know, the likelihood is small", cfg) == "the likelihood is small");
  CHECK(preprocess("I MEAN we should go", cfg) == "we should go");
  CHECK(preprocess("Basically, done", cfg) == "done");
  // A leading "Word:" is a speaker label and survives.
  CHECK(preprocess("Basically: done", cfg) == "Basically: done");
}

TEST_CASE("stopwords are removed from bodies but not labels") {
  auto cfg = PreprocessConfig::defaults();
  cfg.filler_words.clear();
  cfg.stopwords = {"the", "a", "of", "it"};
  CHECK(preprocess("The:  the end of a line", cfg) == "The: end line");
  CHECK(preprocess("we can try it", cfg) == "we can try");
}

TEST_CASE("preprocess is idempotent") {
  for (const char* text :
       {"Fanda:  like, adapt this towards check summarization, like, you just, like, one thing",
        "Vojta:  a different DHCP server named care so we can try it, I've never used it.",
        "no label here, um, okay", "  A:   spaced   out  \n\n B: x "}) {
    for (const auto& cfg : {PreprocessConfig::defaults(), fillers_only()}) {
      auto once = preprocess(text, cfg);
      CHECK(preprocess(once, cfg) == once);
    }
  }
}

TEST_CASE("speaker label split") {
  auto s = split_speaker("Vojta:  hello there");
  REQUIRE(s);
  CHECK(s->first == "Vojta");
  CHECK(s->second == "hello there");
  CHECK_FALSE(split_speaker("no label at all"));
}

TEST_CASE("default lists") {
  const auto& f = default_filler_words();
  for (const char* w : {"um", "uh", "like", "you know", "i mean", "so", "okay", "well", "actually",
                        "basically"}) {
    bool found = false;
    for (const auto& x : f) found |= x == w || (x.size() == std::string(w).size() && std::equal(x.begin(), x.end(), w, [](char a, char b) { return std::tolower(a) == std::tolower(b); }));
    CHECK_MESSAGE(found, w);
  }
  CHECK(default_stopwords().count("the") == 1);
  CHECK(default_stopwords().count("dhcp") == 0);
}

TEST_CASE("mock summary template") {
  CHECK(mock_summarize("Vojta: we can try it") == "Vojta discuss: we can try it");
  CHECK(mock_summarize("Vojta: DHCP server Kea\nFanda: yes") ==
        "Fanda and Vojta discuss: DHCP server Kea yes");
  CHECK(mock_summarize("B: one two three four five six seven eight nine\nA: ten") ==
        "A and B discuss: one two three four five six seven eight");
  CHECK(mock_summarize("just words") == "Participants discuss: just words");
  CHECK(mock_summarize("x") == mock_summarize("x"));
}

TEST_CASE("summarizer sentinels and retries") {
  auto flaky = std::make_shared<FlakySummarizer>(1);
  Summarizer s(flaky, PreprocessConfig::defaults(), RetryPolicy{}, [](auto) {});
  CHECK(s.summarize("text") == "summary of text");
  CHECK(flaky->calls == 2);
  CHECK(s.summarize("") == kEmptySentinel);
  CHECK(s.summarize_segment("A:  um") == kEmptySentinel);

  auto down = std::make_shared<FlakySummarizer>(100);
  Summarizer dead(down, PreprocessConfig::defaults(), RetryPolicy{}, [](auto) {});
  CHECK(dead.summarize("text") == kFailedSentinel);
  CHECK(down->calls == 4);
}

TEST_CASE("summarizer backend selection") {
  CHECK(dynamic_cast<MockSummarizer*>(make_backend("mock:").get()));
  CHECK(dynamic_cast<HttpSummarizer*>(make_backend("http://localhost:9").get()));
}
