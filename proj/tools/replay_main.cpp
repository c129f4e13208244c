#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "minuteman/replay.hpp"

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace minuteman;
  CLI::App app{"Feeds a scripted or recorded meeting through the minuting pipeline"};
  std::string manifest_path;
  std::string mode_name;
  std::string out_dir;
  std::string server;
  std::optional<std::uint64_t> seed;
  std::string asr_url = env_or("ASR_URL", "mock:");
  std::string summ_url = env_or("SUMM_URL", "mock:");
  double debounce_s = orchestrator::kDefaultDebounceS;
  std::string asr_manifest_out;

  app.add_option("--manifest", manifest_path, "YAML meeting manifest")->required();
  app.add_option("--mode", mode_name, "fast or realtime (default: manifest, else fast)")
      ->check(CLI::IsMember({"fast", "realtime"}));
  app.add_option("--out", out_dir, "Directory for transcript.txt, minutes.txt, events.log");
  app.add_option("--server", server, "Drive a running server at this URL instead");
  app.add_option("--seed", seed, "Seed for the synthesized speech");
  app.add_option("--asr-url", asr_url, "ASR backend for recorded tracks")->capture_default_str();
  app.add_option("--summ-url", summ_url, "Summarizer backend")->capture_default_str();
  app.add_option("--debounce", debounce_s, "Re-summarization debounce in seconds")
      ->capture_default_str();
  app.add_option("--write-asr-manifest", asr_manifest_out,
                 "Only write the generated mock ASR table (for ASR_URL=mock:<file>)");
  CLI11_PARSE(app, argc, argv);

  try {
    auto manifest = replay::load_manifest(manifest_path);
    if (seed) manifest.seed = *seed;

    if (!asr_manifest_out.empty()) {
      auto table = replay::mock_asr_manifest(manifest, replay::render_tracks(manifest),
                                             segmenter::kDefaultMaxUtteranceSeconds);
      std::ofstream out(asr_manifest_out);
      out << nlohmann::json(table).dump(2) << "\n";
      return out ? 0 : 1;
    }
    if (out_dir.empty()) {
      std::cerr << "--out is required\n";
      return 2;
    }

    replay::Options options;
    const auto mode = !mode_name.empty() ? mode_name : manifest.mode.value_or("fast");
    options.mode = mode == "realtime" ? replay::Mode::kRealtime : replay::Mode::kFast;
    options.pipeline.asr_url = asr_url;
    options.pipeline.summ_url = summ_url;
    options.pipeline.debounce_s = debounce_s;

    auto result = server.empty() ? replay::run(manifest, options)
                                 : replay::run_remote(manifest, options, server);
    replay::write_outputs(result, out_dir);
    return 0;
  } catch (const replay::ManifestError& e) {
    std::cerr << "manifest error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "replay failed: " << e.what() << "\n";
    return 1;
  }
}
