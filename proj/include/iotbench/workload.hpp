#pragma once

// Per-client operation streams: write batches interleaved with dashboard
// queries, plus the record split used by the scalability test.

#include <array>
#include <limits>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "iotbench/datagen.hpp"
#include "iotbench/query.hpp"

namespace iotbench::workload {

enum class DataMethod { distribution, replay, model };

std::string_view to_string(DataMethod m);
DataMethod data_method_from_string(std::string_view s);

/// How sensor values and timestamps are produced.
struct DataConfig {
  DataMethod method = DataMethod::distribution;
  std::vector<ValueKind> kinds{ValueKind::float64};
  datagen::DistributionSpec float_dist = datagen::DistributionSpec::pareto(3, 1);
  datagen::DistributionSpec int_dist = datagen::DistributionSpec::poisson(10);
  datagen::DistributionSpec string_length = datagen::DistributionSpec::uniform(8, 64);
  std::size_t max_string_len = datagen::kDefaultMaxStringLen;
  datagen::SpacingSpec spacing;
  Timestamp start_ts = 1'600'000'000'000;
  std::shared_ptr<const datagen::SampleSet> sample;     // replay
  std::shared_ptr<const datagen::GeneratorModel> model;  // model
};

struct SensorInfo {
  std::string id;
  ValueKind kind = ValueKind::float64;
  double range_lo = 0, range_hi = 0;  // numeric kinds only
};

/// The m_s simulated sensors, named sensor_<i>.
class SensorSpace {
 public:
  static SensorSpace build(std::size_t sensor_count, const DataConfig& data, std::uint64_t seed);

  std::size_t size() const noexcept { return sensors_.size(); }
  const SensorInfo& at(std::size_t i) const { return sensors_.at(i); }
  const SensorInfo* find(std::string_view id) const;
  const std::vector<std::size_t>& numeric() const noexcept { return numeric_; }

 private:
  std::vector<SensorInfo> sensors_;
  std::vector<std::size_t> numeric_;
};

// --- record allocation ----------------------------------------------------

struct Allocation {
  int k = 0;
  std::int64_t total = 0;  // N_p
  std::vector<std::int64_t> per_client;
  int scale_out_client_index = 0;
};

/// k-1 clients receive floor(2N_p/(2k-1)) records; the scale-out client (the
/// last) receives the remainder, close to N_p/(2k-1).
Allocation allocate_records(std::int64_t total_records, int k);

// --- queries ----------------------------------------------------------------

struct TimeWindow {
  Timestamp lo = std::numeric_limits<Timestamp>::max();
  Timestamp hi = std::numeric_limits<Timestamp>::min();

  bool empty() const noexcept { return lo > hi; }
  void extend(Timestamp t) noexcept {
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
};

struct QueryMix {
  double query_fraction = 0.05;  // q
  std::array<double, kQueryTemplateCount> template_weights{1, 1, 1, 1};
  std::size_t min_sensors = 1;
  std::size_t max_sensors = 4;

  void validate() const;
};

/// Draws a query over the observed window. Aggregation, downsample and
/// filtered templates draw from numeric sensors and fall back to time_range
/// when the space has none. Throws Error on an empty window.
QuerySpec gen_query(QueryTemplate tmpl, datagen::RandomSource& rng, const SensorSpace& space, TimeWindow window,
                    const QueryMix& mix = {});

/// Checks a spec against the template invariants and the sensor space
/// (condition value within the sensor's range).
bool conforms(const QuerySpec& spec, const SensorSpace& space);

// --- operation stream ------------------------------------------------------------

struct WorkloadOp {
  enum class Kind { write, query } kind = Kind::write;
  std::vector<DataPoint> batch;
  QuerySpec query;
  int client_id = 0;
  int thread_id = 0;

  std::int64_t batch_bytes() const;
};

struct ClientConfig {
  int client_id = 0;
  int thread_id = 0;
  std::vector<std::size_t> sensors;  // indices into the SensorSpace this client writes
  std::int64_t budget = 0;
  std::size_t batch_size = 100;
  QueryMix mix;
  std::uint64_t seed = 0;
};

/// Value/timestamp stream for one sensor under the configured method.
class SensorStream {
 public:
  SensorStream(const SensorInfo& info, const DataConfig& data, std::size_t thread_index, std::uint64_t seed);
  DataPoint next();

 private:
  struct Parametric {
    datagen::TimestampState clock;
    datagen::ValueGenerator values;
  };
  using State = std::variant<Parametric, datagen::ReplayState, datagen::SynthState>;
  static State make_state(const SensorInfo& info, const DataConfig& data, std::size_t thread_index,
                          std::uint64_t seed);

  std::string id_;
  datagen::SpacingSpec spacing_;
  std::shared_ptr<const datagen::SampleSet> sample_;
  std::shared_ptr<const datagen::GeneratorModel> model_;
  State state_;
};

/// Single-owner op generator for one client thread. Writes are drawn
/// round-robin over the client's sensors so each sensor stays time-ordered.
class ClientWorkload {
 public:
  ClientWorkload(std::shared_ptr<const SensorSpace> space, const DataConfig& data, ClientConfig config);

  /// Next op, or nullopt once the budget (or `write_limit` points issued in
  /// total) is reached. Queries are only drawn once something was written.
  std::optional<WorkloadOp> next_op(std::int64_t write_limit = std::numeric_limits<std::int64_t>::max());

  /// Starts a new budgeted run; generators continue where they stopped.
  void reset_budget(std::int64_t budget);

  std::int64_t issued() const noexcept { return issued_; }
  std::int64_t remaining() const noexcept { return budget_ - issued_; }
  const TimeWindow& window() const noexcept { return window_; }
  const ClientConfig& config() const noexcept { return config_; }

 private:
  std::shared_ptr<const SensorSpace> space_;
  ClientConfig config_;
  std::vector<SensorStream> streams_;
  std::size_t cursor_ = 0;
  datagen::RandomSource rng_;
  TimeWindow window_;
  std::int64_t budget_ = 0;
  std::int64_t issued_ = 0;
};

}  // namespace iotbench::workload
