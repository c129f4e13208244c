#include "minuteman/gateway.hpp"

#include <atomic>
#include <cctype>
#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <boost/asio.hpp>
#include <boost/beast.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "minuteman/errors.hpp"
#include "minuteman/text.hpp"
#include "minuteman/wire.hpp"

namespace minuteman::gateway {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;

namespace {

std::atomic<std::uint64_t> g_next_author{1};

struct Target {
  std::vector<std::string> path;
  std::map<std::string, std::string> query;
};

std::string percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out.push_back(static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16)));
      i += 2;
    } else {
      out.push_back(s[i] == '+' ? ' ' : s[i]);
    }
  }
  return out;
}

Target parse_target(std::string_view target) {
  Target out;
  auto q = target.find('?');
  auto path = target.substr(0, q);
  std::size_t pos = 0;
  while (pos < path.size()) {
    auto slash = path.find('/', pos);
    if (slash == std::string_view::npos) slash = path.size();
    if (slash > pos) out.path.push_back(percent_decode(path.substr(pos, slash - pos)));
    pos = slash + 1;
  }
  if (q == std::string_view::npos) return out;
  auto query = target.substr(q + 1);
  pos = 0;
  while (pos <= query.size()) {
    auto amp = query.find('&', pos);
    if (amp == std::string_view::npos) amp = query.size();
    auto pair = query.substr(pos, amp - pos);
    if (!pair.empty()) {
      auto eq = pair.find('=');
      out.query[percent_decode(pair.substr(0, eq))] =
          eq == std::string_view::npos ? "" : percent_decode(pair.substr(eq + 1));
    }
    pos = amp + 1;
  }
  return out;
}

Response json_response(int status, const json& body) { return {status, "application/json", body.dump()}; }

Response text_response(std::string body) { return {200, "text/plain; charset=utf-8", std::move(body)}; }

Response error_response(int status, const std::string& message) {
  return json_response(status, json{{"error", message}});
}

json parse_body(const std::string& body) {
  if (body.empty()) return json::object();
  auto j = json::parse(body);
  if (!j.is_object()) throw ValidationError("request body must be a JSON object");
  return j;
}

template <typename T>
T required(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(std::string("missing field ") + key);
  return it->get<T>();
}

std::string content_type_for(const std::filesystem::path& p) {
  static const std::map<std::string, std::string> types{
      {".html", "text/html; charset=utf-8"}, {".js", "text/javascript"},
      {".css", "text/css"},                  {".json", "application/json"},
      {".svg", "image/svg+xml"},             {".png", "image/png"}};
  auto it = types.find(p.extension().string());
  return it == types.end() ? "application/octet-stream" : it->second;
}

doc::EditOp edit_from_json(const std::string& doc_id, const json& j, std::string author) {
  doc::EditOp op;
  op.doc_id = doc_id;
  op.base_revision = required<std::uint64_t>(j, "base_revision");
  op.author = std::move(author);
  op.components = wire::components_from_json(required<json>(j, "components"));
  return op;
}

}  // namespace

void EventLog::record(const Event& event) {
  std::lock_guard lock(mutex_);
  lines_[event.session_id].push_back(event.format());
}

std::vector<std::string> EventLog::lines(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  auto it = lines_.find(session_id);
  return it == lines_.end() ? std::vector<std::string>{} : it->second;
}

std::string assign_author(std::string display_name) {
  if (display_name.empty() || display_name == doc::kSystemAuthor) display_name = "user";
  return display_name + "#" + std::to_string(g_next_author++);
}

// ---------------------------------------------------------------------------
// Transport

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, Gateway& gateway, std::string session_id, std::string author)
      : ws_(std::move(socket)),
        gateway_(gateway),
        session_id_(std::move(session_id)),
        author_(std::move(author)) {}

  void run(http::request<http::string_body> request) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(request, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    try {
      editor_ = gateway_.pipeline().session(session_id_);
    } catch (const NotFoundError&) {
      ws_.async_close(websocket::close_code::policy_error, [self = shared_from_this()](auto) {});
      return;
    }
    // Runs on the stream's strand: broadcasts posted by the listener queue
    // up behind the initial messages.
    std::weak_ptr<WsSession> weak = shared_from_this();
    auto executor = ws_.get_executor();
    auto joined = editor_->join([weak, executor](const json& message) {
      auto text = std::make_shared<std::string>(message.dump());
      net::post(executor, [weak, text] {
        if (auto self = weak.lock()) self->send(text);
      });
    });
    listener_id_ = joined.listener_id;
    send(std::make_shared<std::string>(
        json{{"type", "welcome"}, {"session_id", session_id_}, {"author", author_}}.dump()));
    for (const auto& m : joined.initial) send(std::make_shared<std::string>(m.dump()));
    do_read();
  }

  void do_read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      if (editor_) editor_->leave(listener_id_);
      return;
    }
    auto text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    handle_message(text);
    do_read();
  }

  void handle_message(const std::string& text) {
    try {
      auto j = json::parse(text);
      const auto type = j.value("type", std::string());
      if (type == "edit") {
        gateway_.pipeline().apply_edit(
            session_id_, edit_from_json(required<std::string>(j, "doc_id"), j, author_));
      } else if (type == "summarize") {
        gateway_.pipeline().request_summary(
            session_id_, {required<std::uint64_t>(j, "start_seq"), required<std::uint64_t>(j, "end_seq")});
      } else if (type == "debug") {
        gateway_.pipeline().set_debug(session_id_, required<bool>(j, "enabled"));
      } else {
        throw ValidationError("unknown message type '" + type + "'");
      }
    } catch (const std::exception& e) {
      send(std::make_shared<std::string>(json{{"type", "error"}, {"message", e.what()}}.dump()));
    }
  }

  void send(std::shared_ptr<std::string> text) {
    queue_.push_back(std::move(text));
    if (queue_.size() == 1) do_write();
  }

  void do_write() {
    ws_.text(true);
    ws_.async_write(net::buffer(*queue_.front()),
                    beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      queue_.clear();
      return;
    }
    queue_.pop_front();
    if (!queue_.empty()) do_write();
  }

  websocket::stream<beast::tcp_stream> ws_;
  Gateway& gateway_;
  std::string session_id_;
  std::string author_;
  std::shared_ptr<editor::EditorSession> editor_;
  std::uint64_t listener_id_ = 0;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<std::string>> queue_;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, Gateway& gateway, std::size_t body_limit)
      : stream_(std::move(socket)), gateway_(gateway), body_limit_(body_limit) {}

  void run() {
    net::dispatch(stream_.get_executor(),
                  beast::bind_front_handler(&HttpSession::do_read, shared_from_this()));
  }

 private:
  void do_read() {
    parser_.emplace();
    parser_->body_limit(body_limit_);
    stream_.expires_after(std::chrono::seconds(60));
    http::async_read(stream_, buffer_, *parser_,
                     beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    if (ec) return;
    auto request = parser_->release();

    if (websocket::is_upgrade(request)) {
      auto target = parse_target(std::string(request.target()));
      const auto& p = target.path;
      if (p.size() == 3 && p[0] == "sessions" && p[2] == "sync") {
        stream_.expires_never();
        auto author = assign_author(target.query.count("author") ? target.query["author"] : "");
        std::make_shared<WsSession>(stream_.release_socket(), gateway_, p[1], author)
            ->run(std::move(request));
        return;
      }
    }

    Request req{std::string(request.method_string()), std::string(request.target()),
                std::move(request.body())};
    auto response = gateway_.handle(req);
    auto out = std::make_shared<http::response<http::string_body>>(
        static_cast<http::status>(response.status), request.version());
    out->set(http::field::server, "minuteman");
    out->set(http::field::content_type, response.content_type);
    out->keep_alive(request.keep_alive());
    out->body() = std::move(response.body);
    out->prepare_payload();
    http::async_write(stream_, *out,
                      [self = shared_from_this(), out](beast::error_code ec, std::size_t) {
                        if (ec) return;
                        if (!out->keep_alive()) {
                          self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
                          return;
                        }
                        self->do_read();
                      });
  }

  beast::tcp_stream stream_;
  Gateway& gateway_;
  std::size_t body_limit_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
};

struct Gateway::Server {
  net::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::vector<std::thread> threads;

  void accept(Gateway& gateway, std::size_t body_limit) {
    acceptor.async_accept(net::make_strand(ioc),
                          [this, &gateway, body_limit](beast::error_code ec, tcp::socket socket) {
                            if (ec) return;
                            std::make_shared<HttpSession>(std::move(socket), gateway, body_limit)
                                ->run();
                            accept(gateway, body_limit);
                          });
  }
};

Gateway::Gateway(PipelineOptions pipeline_options, GatewayOptions options)
    : options_(std::move(options)), events_(std::make_shared<EventLog>()) {
  auto forward = std::move(pipeline_options.on_event);
  pipeline_options.on_event = [log = events_, forward](const Event& event) {
    log->record(event);
    if (forward) forward(event);
  };
  pipeline_ = std::make_unique<Pipeline>(std::move(pipeline_options));
}

Gateway::~Gateway() { stop(); }

void Gateway::start() {
  if (server_) return;
  auto colon = options_.bind_addr.rfind(':');
  if (colon == std::string::npos) throw ValidationError("BIND_ADDR must be host:port");
  auto host = options_.bind_addr.substr(0, colon);
  auto port = static_cast<std::uint16_t>(std::stoi(options_.bind_addr.substr(colon + 1)));

  pipeline_->start();
  server_ = std::make_unique<Server>();
  tcp::endpoint endpoint{net::ip::make_address(host.empty() ? "0.0.0.0" : host), port};
  server_->acceptor.open(endpoint.protocol());
  server_->acceptor.set_option(net::socket_base::reuse_address(true));
  server_->acceptor.bind(endpoint);
  server_->acceptor.listen();
  port_ = server_->acceptor.local_endpoint().port();
  server_->accept(*this, options_.max_body_bytes);
  for (std::size_t i = 0; i < std::max<std::size_t>(options_.io_threads, 1); ++i) {
    server_->threads.emplace_back([this] { server_->ioc.run(); });
  }
  spdlog::info("gateway listening on {}:{}", host, port_);
}

void Gateway::stop() {
  if (server_) {
    server_->ioc.stop();
    for (auto& t : server_->threads) t.join();
    server_.reset();
  }
  if (pipeline_) pipeline_->stop();
}

// ---------------------------------------------------------------------------
// Routing

Response Gateway::handle(const Request& request) {
  try {
    return route(request);
  } catch (const NotFoundError& e) {
    return error_response(404, e.what());
  } catch (const SequencingError& e) {
    return error_response(409, e.what());
  } catch (const BusShutdownError& e) {
    return error_response(503, e.what());
  } catch (const Error& e) {
    return error_response(400, e.what());
  } catch (const json::exception& e) {
    return error_response(400, e.what());
  } catch (const std::exception& e) {
    spdlog::error("{} {}: {}", request.method, request.target, e.what());
    return error_response(500, e.what());
  }
}

Response Gateway::route(const Request& request) {
  const auto target = parse_target(request.target);
  const auto& p = target.path;
  const auto& m = request.method;
  auto& pl = *pipeline_;

  if (p.empty() || p[0] != "sessions") {
    if (m != "GET") return error_response(405, "method not allowed");
    return serve_static(p.empty() ? "index.html" : text::join(p, "/"));
  }

  if (p.size() == 1) {
    if (m != "POST") return error_response(405, "method not allowed");
    auto body = parse_body(request.body);
    std::optional<int> words;
    if (body.contains("chunk_length_words")) words = body["chunk_length_words"].get<int>();
    auto info = pl.create_session(words);
    return json_response(201, json{{"session_id", info.session_id},
                                   {"chunk_length_words", info.chunk_length_words}});
  }

  const std::string& sid = p[1];
  if (p.size() == 2) {
    if (m != "GET") return error_response(405, "method not allowed");
    auto info = pl.ingest().find(sid);
    if (!info) throw NotFoundError("unknown session " + sid);
    auto editor = pl.session(sid);
    auto revisions = editor->inspect([](const auto& t, const auto& s, const auto&) {
      return json{{"transcript", t.revision()}, {"summary", s.revision()}};
    });
    return json_response(200, json{{"session_id", sid},
                                   {"chunk_length_words", info->chunk_length_words},
                                   {"tracks", info->tracks},
                                   {"closed", info->closed},
                                   {"debug", editor->debug()},
                                   {"revisions", revisions},
                                   {"quiescent", pl.quiescent(sid)},
                                   {"pipeline_idle", pl.bus().idle()}});
  }

  const std::string& leaf = p[2];
  if (p.size() == 3) {
    if (leaf == "config" && m == "PUT") {
      pl.set_chunk_length(sid, required<int>(parse_body(request.body), "chunk_length_words"));
      return json_response(200, json{{"chunk_length_words", pl.ingest().chunk_length_words(sid)}});
    }
    if (leaf == "debug" && m == "PUT") {
      auto enabled = required<bool>(parse_body(request.body), "enabled");
      pl.set_debug(sid, enabled);
      return json_response(200, json{{"enabled", enabled}});
    }
    if (leaf == "close" && m == "POST") {
      pl.close_session(sid);
      return json_response(200, json{{"closed", true}});
    }
    if (leaf == "summarize" && m == "POST") {
      auto body = parse_body(request.body);
      pl.request_summary(sid, {required<std::uint64_t>(body, "start_seq"),
                               required<std::uint64_t>(body, "end_seq")});
      return json_response(202, json{{"accepted", true}});
    }
    if ((leaf == "transcript" || leaf == "summary") && m == "GET") {
      return text_response(pl.session(sid)->text(leaf));
    }
    if (leaf == "points" && m == "GET") return json_response(200, pl.session(sid)->points_json());
    if (leaf == "events" && m == "GET") {
      pl.session(sid);
      std::string out;
      for (const auto& line : events_->lines(sid)) out += line + "\n";
      return text_response(std::move(out));
    }
  }

  if (leaf == "docs" && p.size() == 4 && m == "GET") return json_response(200, pl.session(sid)->snapshot(p[3]));
  if (leaf == "docs" && p.size() == 5 && p[4] == "edits" && m == "POST") {
    auto body = parse_body(request.body);
    auto op = edit_from_json(p[3], body, assign_author(body.value("author", std::string())));
    auto applied = pl.apply_edit(sid, op);
    return json_response(200, wire::edit_applied_json(applied));
  }

  if (leaf == "tracks" && p.size() == 6 && p[4] == "chunks" && m == "POST") {
    std::uint64_t seq = 0;
    try {
      std::size_t used = 0;
      seq = std::stoull(p[5], &used);
      if (used != p[5].size()) throw std::invalid_argument(p[5]);
    } catch (const std::logic_error&) {
      throw ValidationError("chunk_seq must be a non-negative integer");
    }
    auto enqueue_seq = pl.ingest_chunk(sid, p[3], seq, request.body);
    return json_response(202, json{{"enqueue_seq", enqueue_seq}});
  }
  if (leaf == "tracks" && p.size() == 5 && p[4] == "speaker" && m == "PUT") {
    pl.register_speaker(sid, p[3], required<std::string>(parse_body(request.body), "speaker_label"));
    return json_response(200, json{{"speaker_label", pl.ingest().speaker_label(sid, p[3])}});
  }
  return error_response(404, "no route for " + m + " " + request.target);
}

Response Gateway::serve_static(const std::string& path) const {
  if (options_.static_dir.empty()) {
    if (path == "index.html") {
      return {200, "text/html; charset=utf-8",
              "<!doctype html><title>Minuteman</title><p>Minuteman gateway. No web client "
              "assets configured.</p>\n"};
    }
    return error_response(404, "not found");
  }
  if (path.find("..") != std::string::npos) return error_response(404, "not found");
  std::filesystem::path file = std::filesystem::path(options_.static_dir) / path;
  if (std::filesystem::is_directory(file)) file /= "index.html";
  std::ifstream in(file, std::ios::binary);
  if (!in) return error_response(404, "not found");
  std::ostringstream data;
  data << in.rdbuf();
  return {200, content_type_for(file), data.str()};
}

}  // namespace minuteman::gateway
