#include "minuteman/events.hpp"

#include <cstdio>
#include <nlohmann/json.hpp>

#include "minuteman/errors.hpp"

namespace minuteman {

namespace {

bool needs_quotes(const std::string& v) {
  if (v.empty()) return true;
  for (char c : v) {
    auto u = static_cast<unsigned char>(c);
    if (u <= 0x20 || c == '"' || c == '=' || c == '\\' || u >= 0x7f) return true;
  }
  return false;
}

std::string format_time(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", t);
  return buf;
}

}  // namespace

std::string Event::format() const {
  std::string out = "t=" + format_time(time_s) + " session=" + session_id + " " + type;
  for (const auto& [key, value] : fields) {
    out += ' ';
    out += key;
    out += '=';
    out += needs_quotes(value) ? nlohmann::json(value).dump() : value;
  }
  return out;
}

Event Event::parse(const std::string& line) {
  Event event;
  std::size_t pos = 0;
  auto next_token = [&]() -> std::pair<std::string, std::string> {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    auto eq = line.find_first_of("= ", pos);
    if (eq == std::string::npos || line[eq] == ' ') {
      auto end = eq == std::string::npos ? line.size() : eq;
      auto word = line.substr(pos, end - pos);
      pos = end;
      return {word, {}};
    }
    auto key = line.substr(pos, eq - pos);
    pos = eq + 1;
    if (pos < line.size() && line[pos] == '"') {
      std::size_t end = pos + 1;
      while (end < line.size() && line[end] != '"') end += line[end] == '\\' ? 2 : 1;
      auto quoted = line.substr(pos, end + 1 - pos);
      pos = end + 1;
      return {key, nlohmann::json::parse(quoted).get<std::string>()};
    }
    auto end = line.find(' ', pos);
    if (end == std::string::npos) end = line.size();
    auto value = line.substr(pos, end - pos);
    pos = end;
    return {key, value};
  };

  auto [tkey, tval] = next_token();
  if (tkey != "t") throw FormatError("event line lacks a timestamp: " + line);
  event.time_s = std::stod(tval);
  auto [skey, sval] = next_token();
  if (skey != "session") throw FormatError("event line lacks a session: " + line);
  event.session_id = sval;
  event.type = next_token().first;
  while (pos < line.size()) {
    auto [key, value] = next_token();
    if (!key.empty()) event.fields.emplace_back(std::move(key), std::move(value));
  }
  return event;
}

const std::string* Event::field(const std::string& key) const {
  for (const auto& [k, v] : fields) {
    if (k == key) return &v;
  }
  return nullptr;
}

}  // namespace minuteman
