#pragma once

// Embedded time-series store used as the built-in system under test.
//
// Layout under the data directory:
//   node_<i>/<sensor>.seg   append-only segment records (see codec.hpp)
//   node_<i>/index          per-node sensor index, rewritten on flush
// Sensors are spread over logical nodes by hash. scale_out() adds a node and
// migrates a 1/(m+1) share of sensors to it in the background.

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <thread>
#include <unordered_map>

#include "iotbench/codec.hpp"
#include "iotbench/sut.hpp"

namespace iotbench::sut {

struct ReferenceStoreOptions {
  std::filesystem::path root;
  int nodes = 1;
  bool scalable = true;
  bool compress = true;  // false: every segment uses CodecId::none
  std::size_t segment_points = 4096;
  AggFunction downsample_agg = AggFunction::avg;

  /// Reads `data_dir`, `nodes`, `scalable`, `codec` (auto|none), `segment_points`, `downsample_agg`.
  static ReferenceStoreOptions from(const SutOptions& options);
};

class ReferenceStore final : public SutAdapter {
 public:
  explicit ReferenceStore(ReferenceStoreOptions options);
  ~ReferenceStore() override;

  SutDescriptor descriptor() const override;
  InsertAck insert(std::span<const DataPoint> batch) override;
  std::vector<Row> query(const QuerySpec& spec) override;
  ScaleOutResult scale_out() override;
  std::int64_t disk_usage() override;
  void flush() override;
  void cleanup() override;
  std::optional<std::int64_t> stored_points() override;

  /// Blocks until a background migration (if any) has finished.
  void wait_for_migration();
  /// Node currently holding `sensor`, or -1.
  int node_of(const std::string& sensor) const;
  std::size_t migrated_sensors() const noexcept { return migrated_.load(); }

 private:
  struct SegmentRef {
    std::uint64_t offset = 0;
    std::uint64_t length = 0;
    Timestamp first_ts = 0;
    Timestamp last_ts = 0;
    std::uint32_t count = 0;
  };

  struct Series {
    std::mutex mu;
    std::string id;
    ValueKind kind = ValueKind::float64;
    bool kind_known = false;
    int node = 0;
    Timestamp last_ts = 0;
    bool has_points = false;
    std::vector<SegmentRef> segments;
    std::vector<DataPoint> head;
    std::uint64_t file_size = 0;
  };

  std::filesystem::path node_dir(int node) const;
  std::filesystem::path series_path(const Series& s) const;
  Series& series_for(const std::string& sensor);
  Series* find_series(const std::string& sensor) const;
  void seal(Series& s, std::size_t count);
  std::vector<DataPoint> read_range(Series& s, Timestamp lo, Timestamp hi);
  void write_index(int node);
  void migrate(std::vector<Series*> targets, int to_node);
  void reset_layout();

  ReferenceStoreOptions options_;
  mutable std::shared_mutex registry_mu_;
  std::unordered_map<std::string, std::unique_ptr<Series>> series_;
  std::mutex topology_mu_;
  std::atomic<int> node_count_;
  std::thread migration_;
  std::atomic<std::size_t> migrated_{0};
};

}  // namespace iotbench::sut
