#pragma once

#include <atomic>
#include <chrono>

namespace minuteman {

/// Seconds on an arbitrary monotonic timeline.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now_s() const = 0;
};

class SteadyClock final : public Clock {
 public:
  SteadyClock() : origin_(std::chrono::steady_clock::now()) {}
  double now_s() const override {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - origin_).count();
  }

 private:
  std::chrono::steady_clock::time_point origin_;
};

/// Virtual time driven by the caller (replays and tests).
class ManualClock final : public Clock {
 public:
  double now_s() const override { return now_.load(); }
  void set(double t) { now_.store(t); }
  void advance(double dt) { now_.store(now_.load() + dt); }

 private:
  std::atomic<double> now_{0.0};
};

}  // namespace minuteman
