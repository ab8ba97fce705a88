#pragma once

// A synthetic system under test that accepts points at a configured rate and
// changes that rate on scale-out according to a scalability law. Stores no data.

#include <chrono>
#include <mutex>

#include "iotbench/metrics.hpp"
#include "iotbench/sut.hpp"

namespace iotbench::sut {

struct ScalabilityLaw {
  double rate = 10000;  // R, points/sec at the initial node count
  double w_s = 1.0;
  LawMode mode = LawMode::linear;

  void validate() const;
  /// w_s, or w_s^m for decaying linearity.
  double factor(int m) const;
  /// Rate after scaling `current_rate` out from m to m+1 nodes.
  double post_rate(double current_rate, int m) const;
};

struct ModeledSutOptions {
  ScalabilityLaw law;
  int nodes = 2;
  bool scalable = true;
  double synthetic_ratio = 10.0;  // S_i / S_d reported by disk_usage
  bool simulated = false;         // true: virtual clock, no sleeping

  /// Reads `rate`, `w_s`, `mode`, `nodes`, `scalable`, `ratio`, `clock` (wall|simulated).
  static ModeledSutOptions from(const SutOptions& options);
};

class ModeledSut final : public SutAdapter {
 public:
  explicit ModeledSut(ModeledSutOptions options);

  SutDescriptor descriptor() const override;
  InsertAck insert(std::span<const DataPoint> batch) override;
  std::vector<Row> query(const QuerySpec& spec) override;
  ScaleOutResult scale_out() override;
  std::int64_t disk_usage() override;
  void flush() override {}
  void cleanup() override;
  bool retains_data() const override { return false; }
  std::optional<std::int64_t> stored_points() override;
  SimulatedClock* simulated_clock() override { return options_.simulated ? &clock_ : nullptr; }

  double current_rate() const;
  const ModeledSutOptions& options() const noexcept { return options_; }

 private:
  using steady = std::chrono::steady_clock;

  ModeledSutOptions options_;
  mutable std::mutex mu_;
  double rate_;
  int nodes_;
  std::int64_t bytes_ = 0;
  std::int64_t points_ = 0;
  steady::time_point next_free_{};
  SimulatedClock clock_;
};

}  // namespace iotbench::sut
