#include "minuteman/summarizer_client.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <nlohmann/json.hpp>

#include "http_client.hpp"
#include "minuteman/errors.hpp"
#include "minuteman/text.hpp"

namespace minuteman::summarizer {

// Generated from data/stopwords_en.txt.
extern const char* const kStopwordData;

namespace {

constexpr std::size_t kMaxLabelBytes = 64;
constexpr std::size_t kMockWords = 8;

bool is_punct(char c) {
  auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u) && c != '\'';
}

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

std::string_view core(std::string_view token) {
  while (!token.empty() && is_punct(token.front())) token.remove_prefix(1);
  while (!token.empty() && is_punct(token.back())) token.remove_suffix(1);
  return token;
}

std::string trailing_terminal(std::string_view token) {
  std::string tail;
  for (auto it = token.rbegin(); it != token.rend() && is_punct(*it); ++it) {
    if (is_terminal(*it)) tail.insert(tail.begin(), *it);
  }
  return tail;
}

std::set<std::string> parse_stopwords(std::string_view data) {
  std::set<std::string> words;
  for (auto line : text::split_lines(data)) {
    line = text::trim(line);
    if (line.empty() || line.front() == '#') continue;
    words.insert(text::to_lower_ascii(line));
  }
  return words;
}

struct Phrase {
  std::vector<std::string> words;  // lowercase
};

std::vector<Phrase> longest_first(const std::vector<std::string>& fillers) {
  std::vector<Phrase> phrases;
  for (const auto& f : fillers) {
    Phrase p;
    for (auto w : text::split_whitespace(f)) p.words.push_back(text::to_lower_ascii(w));
    if (!p.words.empty()) phrases.push_back(std::move(p));
  }
  std::stable_sort(phrases.begin(), phrases.end(), [](const Phrase& a, const Phrase& b) {
    return a.words.size() > b.words.size();
  });
  return phrases;
}

// Drops a removed span's own punctuation; its sentence end moves onto the
// previous kept word.
void carry_terminal(std::vector<std::string>& kept, std::string_view removed_last,
                    bool strip_comma) {
  if (kept.empty()) return;
  auto& prev = kept.back();
  if (strip_comma) {
    while (!prev.empty() && (prev.back() == ',' || prev.back() == ';')) prev.pop_back();
  }
  auto tail = trailing_terminal(removed_last);
  if (!tail.empty() && !prev.empty() && !is_terminal(prev.back())) prev += tail;
  if (prev.empty()) kept.pop_back();
}

bool remove_fillers(std::vector<std::string>& tokens, const std::vector<Phrase>& phrases) {
  bool changed = false;
  std::vector<std::string> kept;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t matched = 0;
    for (const auto& phrase : phrases) {
      const auto k = phrase.words.size();
      if (i + k > tokens.size()) continue;
      bool all = true;
      for (std::size_t j = 0; j < k && all; ++j) {
        all = text::to_lower_ascii(core(tokens[i + j])) == phrase.words[j];
      }
      if (all) {
        matched = k;
        break;
      }
    }
    if (matched == 0) {
      kept.push_back(std::move(tokens[i]));
      ++i;
      continue;
    }
    carry_terminal(kept, tokens[i + matched - 1], true);
    i += matched;
    changed = true;
  }
  tokens = std::move(kept);
  return changed;
}

bool remove_stopwords(std::vector<std::string>& tokens, const std::set<std::string>& stopwords) {
  bool changed = false;
  std::vector<std::string> kept;
  for (auto& token : tokens) {
    auto c = core(token);
    if (!c.empty() && stopwords.contains(text::to_lower_ascii(c))) {
      carry_terminal(kept, token, false);
      changed = true;
      continue;
    }
    kept.push_back(std::move(token));
  }
  tokens = std::move(kept);
  return changed;
}

}  // namespace

const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words = parse_stopwords(kStopwordData);
  return words;
}

const std::vector<std::string>& default_filler_words() {
  static const std::vector<std::string> words{"um",   "uh",   "like",     "you know",
                                              "I mean", "so", "okay",     "well",
                                              "actually", "basically"};
  return words;
}

PreprocessConfig PreprocessConfig::defaults() {
  return PreprocessConfig{default_filler_words(), true, default_stopwords()};
}

std::set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open stopword list " + path);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_stopwords(data);
}

std::optional<std::pair<std::string_view, std::string_view>> split_speaker(
    std::string_view line) {
  auto colon = line.find(':');
  if (colon == 0 || colon == std::string_view::npos || colon > kMaxLabelBytes) return std::nullopt;
  if (text::is_space(line.front())) return std::nullopt;
  if (colon + 1 >= line.size() || !text::is_space(line[colon + 1])) return std::nullopt;
  if (text::trim(line.substr(colon + 1)).empty()) return std::nullopt;
  auto label = text::trim(line.substr(0, colon));
  return std::make_pair(label, text::trim(line.substr(colon + 1)));
}

std::string preprocess(std::string_view segment_text, const PreprocessConfig& config) {
  const auto phrases = longest_first(config.filler_words);
  std::vector<std::string> out_lines;
  for (auto line : text::split_lines(segment_text)) {
    std::string_view label;
    std::string_view body = line;
    if (auto split = split_speaker(line)) std::tie(label, body) = *split;

    std::vector<std::string> tokens;
    for (auto t : text::split_whitespace(body)) tokens.emplace_back(t);
    bool changed = true;
    while (changed) {
      changed = remove_fillers(tokens, phrases);
      if (config.remove_stopwords) changed |= remove_stopwords(tokens, config.stopwords);
    }
    if (tokens.empty()) continue;

    std::string cleaned;
    if (!label.empty()) {
      cleaned += label;
      cleaned += ": ";
    }
    cleaned += text::join(tokens, " ");
    out_lines.push_back(std::move(cleaned));
  }
  return text::join(out_lines, "\n");
}

std::string mock_summarize(std::string_view cleaned_text) {
  std::set<std::string> speakers;
  std::vector<std::string> words;
  for (auto line : text::split_lines(cleaned_text)) {
    std::string_view body = line;
    if (auto split = split_speaker(line)) {
      speakers.emplace(split->first);
      body = split->second;
    }
    for (auto token : text::split_whitespace(body)) {
      auto c = core(token);
      if (!c.empty() && words.size() < kMockWords) words.emplace_back(c);
    }
  }
  std::string who = speakers.empty()
                        ? std::string("Participants")
                        : text::join(std::vector<std::string>(speakers.begin(), speakers.end()),
                                     " and ");
  return who + " discuss: " + text::join(words, " ");
}

HttpSummarizer::HttpSummarizer(std::string base_url, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {}

std::string HttpSummarizer::summarize(const std::string& cleaned_text) {
  nlohmann::json request{{"text", cleaned_text}};
  auto body = detail::http_post(detail::parse_endpoint(base_url_), "/summarize",
                                request.dump(), "application/json", timeout_);
  return nlohmann::json::parse(body).at("summary").get<std::string>();
}

std::shared_ptr<SummarizerBackend> make_backend(const std::string& summ_url) {
  if (summ_url.rfind("mock:", 0) == 0) return std::make_shared<MockSummarizer>();
  return std::make_shared<HttpSummarizer>(summ_url);
}

Summarizer::Summarizer(std::shared_ptr<SummarizerBackend> backend, PreprocessConfig config,
                       RetryPolicy policy, Sleeper sleep)
    : backend_(std::move(backend)),
      config_(std::move(config)),
      policy_(policy),
      sleep_(std::move(sleep)) {}

std::string Summarizer::summarize(const std::string& cleaned_text) {
  if (text::trim(cleaned_text).empty()) return kEmptySentinel;
  auto result = call_with_retries([&] { return backend_->summarize(cleaned_text); }, policy_,
                                  sleep_);
  if (!result) return kFailedSentinel;
  std::string flat;
  bool in_break = false;
  for (char c : *result) {
    if (c == '\n' || c == '\r') {
      if (!in_break) flat.push_back(' ');
      in_break = true;
    } else {
      flat.push_back(c);
      in_break = false;
    }
  }
  return std::string(text::trim(flat));
}

std::string Summarizer::summarize_segment(std::string_view segment_text) {
  return summarize(preprocess(segment_text, config_));
}

}  // namespace minuteman::summarizer
