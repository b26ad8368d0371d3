#pragma once

#include <atomic>

#include "addictfree/core/time.hpp"

namespace addictfree::service {

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() const = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp now() const override {
    return std::chrono::time_point_cast<Seconds>(std::chrono::system_clock::now());
  }
};

/// Manually driven time for tests and replays.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(Timestamp start = {}) : secs_(to_epoch(start)) {}

  Timestamp now() const override { return from_epoch(secs_.load()); }
  void set(Timestamp t) { secs_.store(to_epoch(t)); }
  void advance(Seconds d) { secs_.fetch_add(d.count()); }

 private:
  std::atomic<std::int64_t> secs_;
};

}  // namespace addictfree::service
