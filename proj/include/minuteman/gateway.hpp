#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "minuteman/pipeline.hpp"

namespace minuteman::gateway {

struct GatewayOptions {
  /// "host:port"; port 0 picks a free one.
  std::string bind_addr = "127.0.0.1:8080";
  /// Directory served under "/". Empty serves a placeholder page.
  std::string static_dir;
  std::size_t io_threads = 2;
  std::size_t max_body_bytes = 1 << 20;
};

/// Transport-independent view of one HTTP exchange.
struct Request {
  std::string method;
  std::string target;  // path plus optional query
  std::string body;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Per-session copy of the pipeline's event log.
class EventLog {
 public:
  void record(const Event& event);
  std::vector<std::string> lines(const std::string& session_id) const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::vector<std::string>> lines_;
};

/// "name#<n>" with a process-unique n. Empty or reserved names become "user".
std::string assign_author(std::string display_name);

/// HTTP and WebSocket front end of a Pipeline, both on one port.
///
///   POST /sessions                                   {chunk_length_words?}
///   GET  /sessions/{sid}                             status
///   POST /sessions/{sid}/tracks/{tid}/chunks/{seq}   32000 bytes s16le PCM
///   PUT  /sessions/{sid}/tracks/{tid}/speaker        {speaker_label}
///   PUT  /sessions/{sid}/config                      {chunk_length_words}
///   PUT  /sessions/{sid}/debug                       {enabled}
///   POST /sessions/{sid}/close
///   POST /sessions/{sid}/summarize                   {start_seq, end_seq}
///   GET  /sessions/{sid}/transcript, /summary        text/plain
///   GET  /sessions/{sid}/docs/{doc}                  snapshot
///   POST /sessions/{sid}/docs/{doc}/edits            {base_revision, components, author}
///   GET  /sessions/{sid}/points
///   GET  /sessions/{sid}/events                      text/plain event log
///   WS   /sessions/{sid}/sync?author=name
class Gateway {
 public:
  /// Wraps `pipeline_options.on_event` to also feed the per-session log.
  Gateway(PipelineOptions pipeline_options, GatewayOptions options = {});
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  /// Starts the pipeline workers and the listener.
  void start();
  void stop();
  /// Bound port, valid after start().
  std::uint16_t port() const { return port_; }

  Response handle(const Request& request);

  Pipeline& pipeline() { return *pipeline_; }
  const EventLog& events() const { return *events_; }

  struct Server;

 private:
  Response route(const Request& request);
  Response serve_static(const std::string& path) const;

  GatewayOptions options_;
  std::shared_ptr<EventLog> events_;
  std::unique_ptr<Pipeline> pipeline_;
  std::unique_ptr<Server> server_;
  std::uint16_t port_ = 0;
};

}  // namespace minuteman::gateway
