#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>

namespace iotbench {

/// Time source the driver measures phases with. Seconds since the clock's origin.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now() const = 0;
  virtual bool simulated() const noexcept = 0;
};

class WallClock final : public Clock {
 public:
  WallClock() : origin_(std::chrono::steady_clock::now()) {}
  double now() const override {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - origin_).count();
  }
  bool simulated() const noexcept override { return false; }
  void reset() { origin_ = std::chrono::steady_clock::now(); }

 private:
  std::chrono::steady_clock::time_point origin_;
};

/// Virtual time driven by work completed at a rate: now = anchor + work / rate.
/// Everything is integral (nanoseconds, points) so equal work sequences give
/// equal readings regardless of thread interleaving.
class SimulatedClock final : public Clock {
 public:
  explicit SimulatedClock(double rate) : rate_(rate) {}

  double now() const override {
    std::lock_guard lock(mu_);
    return static_cast<double>(now_ns_locked()) * 1e-9;
  }
  bool simulated() const noexcept override { return true; }

  /// Accounts `points` of work at the current rate.
  void add_work(std::int64_t points) {
    std::lock_guard lock(mu_);
    work_ += points;
    if (deadline_ns_ && !crossed_ns_) {
      auto t = now_ns_locked();
      if (t >= *deadline_ns_) crossed_ns_ = t;
    }
  }

  /// Idle time: jumps forward to `seconds` if that is later than now.
  void advance_to(double seconds) {
    std::lock_guard lock(mu_);
    auto target = static_cast<std::int64_t>(std::llround(seconds * 1e9));
    if (target > now_ns_locked()) {
      anchor_ns_ = target;
      work_ = 0;
    }
  }

  /// Changes the rate from now on.
  void set_rate(double rate) {
    std::lock_guard lock(mu_);
    anchor_ns_ = now_ns_locked();
    work_ = 0;
    rate_ = rate;
  }

  double rate() const {
    std::lock_guard lock(mu_);
    return rate_;
  }

  /// Back to zero, keeping the rate.
  void reset() {
    std::lock_guard lock(mu_);
    anchor_ns_ = 0;
    work_ = 0;
    deadline_ns_.reset();
    crossed_ns_.reset();
  }

  /// Records the first reading at or past `seconds`; see crossing().
  void watch(double seconds) {
    std::lock_guard lock(mu_);
    deadline_ns_ = static_cast<std::int64_t>(std::llround(seconds * 1e9));
    crossed_ns_.reset();
  }
  std::optional<double> crossing() const {
    std::lock_guard lock(mu_);
    if (!crossed_ns_) return std::nullopt;
    return static_cast<double>(*crossed_ns_) * 1e-9;
  }

 private:
  std::int64_t now_ns_locked() const {
    return anchor_ns_ + static_cast<std::int64_t>(std::llround(static_cast<double>(work_) * 1e9 / rate_));
  }

  mutable std::mutex mu_;
  double rate_;
  std::int64_t anchor_ns_ = 0;
  std::int64_t work_ = 0;
  std::optional<std::int64_t> deadline_ns_;
  std::optional<std::int64_t> crossed_ns_;
};

}  // namespace iotbench
