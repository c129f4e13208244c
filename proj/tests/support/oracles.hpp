#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minuteman/transcript_doc.hpp"

// Reference implementations written straight from the behavioural rules,
// independent of the production code paths.
namespace minuteman::testing {

/// Line indices the extraction scan records: from the first line whose
/// sequence number is at least start, up to the first line (from there on)
/// whose sequence number is at least end; that line is kept only when it
/// carries end itself.
inline std::vector<std::size_t> oracle_extract(const std::vector<std::optional<std::uint64_t>>& seqs,
                                               std::uint64_t start, std::uint64_t end) {
  std::size_t first = seqs.size();
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    if (seqs[i] && *seqs[i] >= start) {
      first = i;
      break;
    }
  }
  if (first == seqs.size()) return {};
  std::size_t stop = seqs.size();  // exclusive
  for (std::size_t j = first; j < seqs.size(); ++j) {
    if (seqs[j] && *seqs[j] >= end) {
      stop = *seqs[j] == end ? j + 1 : j;
      break;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = first; i < stop; ++i) out.push_back(i);
  return out;
}

/// Utterance boundaries implied by a per-chunk speech pattern: maximal speech
/// runs, each cut into consecutive pieces of at most `max_chunks`. Returns
/// (first chunk, chunk count) pairs in time order.
inline std::vector<std::pair<std::size_t, std::size_t>> oracle_partition(
    const std::vector<bool>& speech, std::size_t max_chunks) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t i = 0;
  while (i < speech.size()) {
    if (!speech[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < speech.size() && speech[j]) ++j;
    for (std::size_t k = i; k < j; k += max_chunks) out.emplace_back(k, std::min(max_chunks, j - k));
    i = j;
  }
  return out;
}

}  // namespace minuteman::testing
