#pragma once

#include <chrono>
#include <exception>
#include <functional>
#include <optional>
#include <thread>

namespace minuteman {

/// Exponential backoff for remote backends: one attempt plus `max_retries`.
struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{200};
  double multiplier = 2.0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

inline void real_sleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

/// Calls `attempt` until it returns without throwing. Returns nullopt once the
/// retries are exhausted.
template <typename Fn>
auto call_with_retries(Fn&& attempt, const RetryPolicy& policy, const Sleeper& sleep)
    -> std::optional<decltype(attempt())> {
  auto backoff = policy.initial_backoff;
  for (int tried = 0;; ++tried) {
    try {
      return attempt();
    } catch (const std::exception&) {
      if (tried >= policy.max_retries) return std::nullopt;
    }
    if (sleep) sleep(backoff);
    backoff = std::chrono::milliseconds(
        static_cast<long long>(static_cast<double>(backoff.count()) * policy.multiplier));
  }
}

}  // namespace minuteman
