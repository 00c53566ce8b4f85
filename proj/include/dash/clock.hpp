#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>

namespace dash {

/// Unix-seconds time source. Injected everywhere timestamps are taken.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::uint64_t now() = 0;
};

class SystemClock final : public Clock {
 public:
  std::uint64_t now() override {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
            .count());
  }
};

/// Deterministic clock: returns start, start+step, start+2*step, ...
class SteppingClock final : public Clock {
 public:
  explicit SteppingClock(std::uint64_t start, std::uint64_t step = 0) : next_(start), step_(step) {}
  std::uint64_t now() override { return next_.fetch_add(step_); }

 private:
  std::atomic<std::uint64_t> next_;
  std::uint64_t step_;
};

}  // namespace dash
