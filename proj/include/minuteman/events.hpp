#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace minuteman {

/// One line of the pipeline's event log.
struct Event {
  double time_s = 0;
  std::string session_id;
  std::string type;
  std::vector<std::pair<std::string, std::string>> fields;

  Event& with(std::string key, std::string value) {
    fields.emplace_back(std::move(key), std::move(value));
    return *this;
  }
  Event& with(std::string key, std::uint64_t value) {
    return with(std::move(key), std::to_string(value));
  }

  /// "t=12.000 session=s1 append utt_seq=3 text=\"...\"". Values containing
  /// spaces, quotes or '=' are JSON-quoted.
  std::string format() const;
  /// Inverse of format(), used by log readers.
  static Event parse(const std::string& line);

  const std::string* field(const std::string& key) const;
};

using EventSink = std::function<void(const Event&)>;

}  // namespace minuteman
