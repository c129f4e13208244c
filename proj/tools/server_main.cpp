#include <csignal>
#include <cstdlib>

#include <boost/asio/io_context.hpp>
#include <boost/asio/signal_set.hpp>
#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "minuteman/gateway.hpp"

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace minuteman;
  CLI::App app{"Minuteman meeting minuting server"};
  PipelineOptions pipeline;
  gateway::GatewayOptions options;
  options.bind_addr = env_or("BIND_ADDR", "127.0.0.1:8080");
  pipeline.asr_url = env_or("ASR_URL", "mock:");
  pipeline.summ_url = env_or("SUMM_URL", "mock:");

  app.add_option("--bind", options.bind_addr, "host:port to listen on")->capture_default_str();
  app.add_option("--asr-url", pipeline.asr_url, "ASR backend")->capture_default_str();
  app.add_option("--summ-url", pipeline.summ_url, "Summarizer backend")->capture_default_str();
  app.add_option("--static-dir", options.static_dir, "Web client assets");
  app.add_option("--debounce", pipeline.debounce_s, "Re-summarization debounce in seconds")
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    gateway::Gateway server(pipeline, options);
    server.start();
    boost::asio::io_context signals_ctx;
    boost::asio::signal_set signals(signals_ctx, SIGINT, SIGTERM);
    signals.async_wait([](auto, int sig) { spdlog::info("signal {}, shutting down", sig); });
    signals_ctx.run();
    server.stop();
  } catch (const std::exception& e) {
    spdlog::error("server failed: {}", e.what());
    return 1;
  }
  return 0;
}
