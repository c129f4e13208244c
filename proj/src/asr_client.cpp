#include "minuteman/asr_client.hpp"

#include <openssl/sha.h>

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "http_client.hpp"
#include "minuteman/audio.hpp"
#include "minuteman/errors.hpp"
#include "minuteman/text.hpp"

namespace minuteman::asr {

std::string content_hash(std::span<const std::int16_t> samples) {
  auto bytes = audio::encode_pcm(samples);
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), digest);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * SHA256_DIGEST_LENGTH);
  for (auto b : digest) {
    hex.push_back(kHex[b >> 4]);
    hex.push_back(kHex[b & 0xf]);
  }
  return hex;
}

MockAsr MockAsr::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open ASR mock manifest " + path);
  auto doc = nlohmann::json::parse(in);
  std::map<std::string, std::string> manifest;
  for (const auto& [hash, text] : doc.items()) manifest[hash] = text.get<std::string>();
  return MockAsr(std::move(manifest));
}

std::string MockAsr::transcribe(const segmenter::UtteranceAudio& audio) {
  auto hash = content_hash(audio.audio);
  auto it = manifest_.find(hash);
  if (it != manifest_.end()) return it->second;
  return "UNKNOWN-" + hash.substr(0, 8);
}

HttpAsr::HttpAsr(std::string base_url, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {}

std::string HttpAsr::transcribe(const segmenter::UtteranceAudio& audio) {
  return detail::http_post(detail::parse_endpoint(base_url_), "/transcribe",
                           audio::wav_encode(audio.audio), "audio/wav", timeout_);
}

std::shared_ptr<AsrBackend> make_backend(const std::string& asr_url) {
  if (asr_url.rfind("mock:", 0) == 0) {
    auto path = asr_url.substr(5);
    if (path.empty()) return std::make_shared<MockAsr>();
    return std::make_shared<MockAsr>(MockAsr::from_file(path));
  }
  return std::make_shared<HttpAsr>(asr_url);
}

std::string normalize_transcript(std::string_view raw) {
  std::string flat(raw);
  for (auto& c : flat) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return std::string(text::trim(flat));
}

Transcriber::Transcriber(std::shared_ptr<AsrBackend> backend, RetryPolicy policy, Sleeper sleep)
    : backend_(std::move(backend)), policy_(policy), sleep_(std::move(sleep)) {}

std::string Transcriber::transcribe(const segmenter::UtteranceAudio& audio) {
  auto result = call_with_retries([&] { return backend_->transcribe(audio); }, policy_, sleep_);
  if (!result) return kFailedSentinel;
  return normalize_transcript(*result);
}

std::vector<Resequencer::Slot> Resequencer::offer(std::uint64_t utt_seq,
                                                  std::optional<Utterance> utterance) {
  std::vector<Slot> ready;
  if (utt_seq < next_ || held_.contains(utt_seq)) return ready;
  held_.emplace(utt_seq, std::move(utterance));
  for (auto it = held_.begin(); it != held_.end() && it->first == next_;) {
    ready.push_back(Slot{it->first, std::move(it->second)});
    it = held_.erase(it);
    ++next_;
  }
  return ready;
}

}  // namespace minuteman::asr
