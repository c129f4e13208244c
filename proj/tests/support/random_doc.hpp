#pragma once

#include <random>
#include <string>
#include <vector>

#include "minuteman/text.hpp"
#include "minuteman/transcript_doc.hpp"

namespace minuteman::testing {

inline std::string random_text(std::mt19937_64& rng, std::size_t max_len, bool newlines) {
  static const std::vector<std::string> alphabet{"a", "b", "c", " ", "é", "日", "x"};
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> nl(0, 5);
  std::string s;
  for (std::size_t n = len(rng); n > 0; --n) {
    s += newlines && nl(rng) == 0 ? std::string("\n") : alphabet[pick(rng)];
  }
  return s;
}

/// Lines with unique, increasing utt_seq on a random subset.
inline std::vector<doc::Line> random_lines(std::mt19937_64& rng, std::size_t max_lines) {
  std::uniform_int_distribution<std::size_t> count(0, max_lines);
  std::bernoulli_distribution attributed(0.6);
  std::vector<doc::Line> lines(count(rng));
  std::uint64_t seq = 0;
  for (auto& line : lines) {
    line.text = random_text(rng, 6, false);
    if (attributed(rng)) line.attrs.utt_seq = ++seq;
  }
  return lines;
}

inline doc::Components random_op(std::mt19937_64& rng, std::size_t doc_len,
                                 std::uint64_t fresh_seq) {
  doc::Components out;
  std::uniform_int_distribution<int> kind(0, 2);
  std::bernoulli_distribution with_attrs(0.2);
  std::size_t left = doc_len;
  while (true) {
    int k = kind(rng);
    if (left == 0 && k != 2) break;
    if (k == 2) {
      doc::LineAttrs attrs;
      if (with_attrs(rng)) attrs.utt_seq = fresh_seq;
      out.push_back(doc::Component::insert(random_text(rng, 4, true), attrs));
      if (left == 0) break;
      continue;
    }
    std::uniform_int_distribution<std::size_t> span(1, left);
    auto n = span(rng);
    out.push_back(k == 0 ? doc::Component::retain(n) : doc::Component::erase(n));
    left -= n;
  }
  return doc::normalize(out);
}

}  // namespace minuteman::testing
