#include <doctest.h>

#include "minuteman/transcript_doc.hpp"
#include "../support/oracles.hpp"

using namespace minuteman;
using doc::Line;
using doc::LineAttrs;

namespace {

Line line(std::string text, std::optional<std::uint64_t> seq) {
  Line l;
  l.text = std::move(text);
  l.attrs.utt_seq = seq;
  return l;
}

std::vector<std::size_t> extract_idx(const std::vector<Line>& lines, std::uint64_t a, std::uint64_t b) {
  return doc::extract_segment(lines, {a, b}).line_indices;
}

}  // namespace

TEST_CASE("extract a middle range") {
  std::vector<Line> lines;
  for (std::uint64_t s = 1; s <= 5; ++s) lines.push_back(line("u" + std::to_string(s), s));
  auto seg = doc::extract_segment(lines, {2, 4});
  CHECK(seg.line_indices == std::vector<std::size_t>{1, 2, 3});
  CHECK(seg.text == "u2\nu3\nu4");
}

TEST_CASE("extract with deleted endpoints") {
  std::vector<Line> lines{line("u1", 1), line("u3", 3), line("u5", 5)};
  auto seg = doc::extract_segment(lines, {2, 4});
  CHECK(seg.text == "u3");
}

TEST_CASE("extract from an empty document") {
  auto seg = doc::extract_segment({}, {1, 5});
  CHECK(seg.text.empty());
  CHECK(seg.line_indices.empty());
}

TEST_CASE("user lines inside the range are included") {
  std::vector<Line> lines{line("u2", 2), line("correction", std::nullopt), line("u3", 3)};
  CHECK(doc::extract_segment(lines, {2, 3}).text == "u2\ncorrection\nu3");
}

TEST_CASE("single utterance range includes the line") {
  std::vector<Line> lines{line("u1", 1), line("u2", 2), line("u3", 3)};
  CHECK(doc::extract_segment(lines, {2, 2}).text == "u2");
}

TEST_CASE("a higher sequence number stops recording and is excluded") {
  std::vector<Line> lines{line("u1", 1), line("u2", 2), line("u7", 7), line("u3", 3)};
  CHECK(doc::extract_segment(lines, {2, 3}).text == "u2");
  CHECK(doc::extract_segment(lines, {5, 6}).text.empty());
}

TEST_CASE("extract agrees with the oracle on hand-picked orderings") {
  std::vector<std::vector<std::optional<std::uint64_t>>> docs{
      {3, 1, 2}, {std::nullopt, 2, std::nullopt, 4, 1}, {5, std::nullopt, 5}, {}};
  for (const auto& seqs : docs) {
    std::vector<Line> lines;
    for (auto s : seqs) lines.push_back(line("x", s));
    for (std::uint64_t a = 1; a <= 6; ++a) {
      for (std::uint64_t b = a; b <= 6; ++b) {
        CHECK(extract_idx(lines, a, b) == testing::oracle_extract(seqs, a, b));
      }
    }
  }
}

TEST_CASE("word count") {
  CHECK(doc::word_count("") == 0);
  CHECK(doc::word_count("hello  world") == 2);
  CHECK(doc::word_count("Vojta:  a different DHCP server") == 5);
  CHECK(doc::word_count(" \n\t ") == 0);
  CHECK(doc::word_count("a\nb") == 2);
}

TEST_CASE("utterance line format") {
  CHECK(doc::format_utterance_line("Vojta", "a different DHCP server") ==
        "Vojta:  a different DHCP server");
}
