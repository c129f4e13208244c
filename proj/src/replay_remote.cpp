#include <chrono>
#include <cmath>
#include <thread>

#include <nlohmann/json.hpp>

#include "http_client.hpp"
#include "minuteman/audio.hpp"
#include "minuteman/replay.hpp"
#include "minuteman/text.hpp"
#include "minuteman/wire.hpp"

namespace minuteman::replay {

namespace {

using nlohmann::json;
using namespace std::chrono_literals;

class Remote {
 public:
  explicit Remote(const std::string& url) : endpoint_(detail::parse_endpoint(url)) {}

  json get_json(const std::string& path) {
    return json::parse(detail::http_request(endpoint_, "GET", path, "", "", kTimeout));
  }
  std::string get_text(const std::string& path) {
    return detail::http_request(endpoint_, "GET", path, "", "", kTimeout);
  }
  json send(const std::string& method, const std::string& path, const json& body) {
    auto out = detail::http_request(endpoint_, method, path, body.dump(), "application/json",
                                    kTimeout);
    return out.empty() ? json() : json::parse(out);
  }
  void post_bytes(const std::string& path, const std::string& bytes) {
    detail::http_request(endpoint_, "POST", path, bytes, "application/octet-stream", kTimeout);
  }

 private:
  static constexpr std::chrono::milliseconds kTimeout = 30s;
  detail::HttpEndpoint endpoint_;
};

}  // namespace

Result run_remote(const Manifest& manifest, const Options& options, const std::string& server) {
  Manifest m = manifest;
  if (options.seed) m.seed = *options.seed;
  const auto tracks = render_tracks(m);
  Remote remote(server);

  json create = json::object();
  if (m.chunk_length_words) create["chunk_length_words"] = *m.chunk_length_words;
  const std::string sid = remote.send("POST", "/sessions", create).at("session_id");
  const std::string base = "/sessions/" + sid;
  for (const auto& t : m.tracks) {
    if (t.speaker_label.empty()) continue;
    remote.send("PUT", base + "/tracks/" + t.track_id + "/speaker",
                json{{"speaker_label", t.speaker_label}});
  }

  auto wait_idle = [&] {
    while (!remote.get_json(base).at("pipeline_idle").get<bool>()) std::this_thread::sleep_for(20ms);
  };

  const auto wall_start = std::chrono::steady_clock::now();
  auto wait_until = [&](double t) {
    if (options.mode == Mode::kRealtime) {
      std::this_thread::sleep_until(
          wall_start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                           std::chrono::duration<double>(t)));
    }
  };

  std::size_t next_action = 0;
  auto run_actions = [&](double t) {
    while (next_action < m.actions.size() && m.actions[next_action].at_s <= t) {
      const auto& action = m.actions[next_action++];
      wait_until(action.at_s);
      wait_idle();
      switch (action.kind) {
        case ActionKind::kEdit: {
          auto snap = remote.get_json(base + "/docs/" + action.doc);
          std::vector<doc::Line> lines;
          for (const auto& l : snap.at("lines")) {
            doc::Line line;
            line.text = l.at("text");
            line.attrs = wire::attrs_from_json(l.at("attrs"));
            lines.push_back(std::move(line));
          }
          json body{{"base_revision", action.base_revision.value_or(snap.at("revision"))},
                    {"author", action.author},
                    {"components", wire::to_json(resolve_edit(action, lines))}};
          remote.send("POST", base + "/docs/" + action.doc + "/edits", body);
          break;
        }
        case ActionKind::kSummarize:
          remote.send("POST", base + "/summarize",
                      json{{"start_seq", action.range.start_seq}, {"end_seq", action.range.end_seq}});
          break;
        case ActionKind::kConfig:
          remote.send("PUT", base + "/config", json{{"chunk_length_words", action.chunk_length_words}});
          break;
        case ActionKind::kDebug:
          remote.send("PUT", base + "/debug", json{{"enabled", action.debug}});
          break;
      }
    }
  };

  const std::size_t length = tracks.empty() ? 0 : tracks.front().chunks.size();
  for (std::size_t seq = 0; seq < length; ++seq) {
    wait_until(static_cast<double>(seq + 1));
    for (const auto& track : tracks) {
      remote.post_bytes(base + "/tracks/" + track.track_id + "/chunks/" + std::to_string(seq),
                        audio::encode_pcm(track.chunks[seq]));
    }
    run_actions(static_cast<double>(seq + 1));
  }
  remote.send("POST", base + "/close", json::object());
  run_actions(std::numeric_limits<double>::infinity());

  const auto settle = std::chrono::duration<double>(2 * options.pipeline.debounce_s);
  auto quiet_since = std::chrono::steady_clock::now();
  bool quiet = false;
  while (true) {
    const bool q = remote.get_json(base).at("quiescent").get<bool>();
    const auto now = std::chrono::steady_clock::now();
    if (q && !quiet) quiet_since = now;
    quiet = q;
    if (quiet && now - quiet_since >= settle) break;
    std::this_thread::sleep_for(50ms);
  }

  Result result;
  result.session_id = sid;
  auto with_newline = [](std::string s) {
    if (!s.empty()) s.push_back('\n');
    return s;
  };
  result.transcript = with_newline(remote.get_text(base + "/transcript"));
  result.minutes = with_newline(remote.get_text(base + "/summary"));
  for (auto line : text::split_lines(remote.get_text(base + "/events"))) {
    if (!line.empty()) result.events.emplace_back(line);
  }
  return result;
}

}  // namespace minuteman::replay
