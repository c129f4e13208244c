#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "minuteman/retry.hpp"

namespace minuteman::summarizer {

inline constexpr const char* kFailedSentinel = "[summarization failed]";
inline constexpr const char* kEmptySentinel = "[no content to summarize]";

struct PreprocessConfig {
  /// Matched case-insensitively as whole words or phrases, longest first.
  std::vector<std::string> filler_words;
  bool remove_stopwords = true;
  std::set<std::string> stopwords;  // lowercase

  /// Shipped filler list and English stopword list, stopword removal on.
  static PreprocessConfig defaults();
};

const std::vector<std::string>& default_filler_words();
const std::set<std::string>& default_stopwords();

/// Reads one lowercase word per line; '#' starts a comment.
std::set<std::string> load_stopwords(const std::string& path);

/// Splits "Label:  body" into (label, body). Returns nullopt when the line has
/// no speaker label.
std::optional<std::pair<std::string_view, std::string_view>> split_speaker(
    std::string_view line);

/// Line-wise cleanup before summarization: speaker labels are kept, filler
/// phrases and (optionally) stopwords are removed from the body, whitespace
/// is collapsed and lines left without content are dropped. Idempotent.
std::string preprocess(std::string_view segment_text, const PreprocessConfig& config);

/// "<speakers> discuss: <first eight content words>".
std::string mock_summarize(std::string_view cleaned_text);

class SummarizerBackend {
 public:
  virtual ~SummarizerBackend() = default;
  virtual std::string summarize(const std::string& cleaned_text) = 0;
};

class MockSummarizer final : public SummarizerBackend {
 public:
  std::string summarize(const std::string& cleaned_text) override {
    return mock_summarize(cleaned_text);
  }
};

/// POST {base}/summarize {"text": ...} -> {"summary": ...}.
class HttpSummarizer final : public SummarizerBackend {
 public:
  explicit HttpSummarizer(std::string base_url,
                          std::chrono::milliseconds timeout = std::chrono::seconds(120));
  std::string summarize(const std::string& cleaned_text) override;

 private:
  std::string base_url_;
  std::chrono::milliseconds timeout_;
};

/// "mock:" selects MockSummarizer, anything else is an HTTP base URL.
std::shared_ptr<SummarizerBackend> make_backend(const std::string& summ_url);

class Summarizer {
 public:
  explicit Summarizer(std::shared_ptr<SummarizerBackend> backend,
                      PreprocessConfig config = PreprocessConfig::defaults(),
                      RetryPolicy policy = {}, Sleeper sleep = real_sleep);

  /// Backend call on already-cleaned text. Never throws: empty input and
  /// exhausted retries map to sentinel texts.
  std::string summarize(const std::string& cleaned_text);

  /// preprocess() followed by summarize().
  std::string summarize_segment(std::string_view segment_text);

  const PreprocessConfig& config() const { return config_; }

 private:
  std::shared_ptr<SummarizerBackend> backend_;
  PreprocessConfig config_;
  RetryPolicy policy_;
  Sleeper sleep_;
};

}  // namespace minuteman::summarizer
