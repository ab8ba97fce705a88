#pragma once

// Database interface layer: the adapter contract every system under test
// implements, the adapter registry, and the brute-force query oracle.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iotbench/clock.hpp"
#include "iotbench/query.hpp"
#include "iotbench/types.hpp"

namespace iotbench::sut {

struct SutDescriptor {
  std::string name;
  int node_count = 1;  // m
  bool scalable = true;
};

struct InsertAck {
  std::int64_t points = 0;
  std::int64_t bytes = 0;
};

struct ScaleOutResult {
  bool scaled = false;  // false: the adapter is non-scalable
  SutDescriptor descriptor;
};

class SutError : public Error {
 public:
  using Error::Error;
};

class AdapterUnavailable : public SutError {
 public:
  using SutError::SutError;
};

class OrderingViolation : public SutError {
 public:
  using SutError::SutError;
};

/// Thread-safe adapter contract. Inserts for distinct sensors may proceed in
/// parallel and scale_out() may run concurrently with traffic.
class SutAdapter {
 public:
  virtual ~SutAdapter() = default;

  virtual SutDescriptor descriptor() const = 0;

  /// Batch must be per-sensor timestamp ordered; bytes accepted = sum of encoded_size.
  virtual InsertAck insert(std::span<const DataPoint> batch) = 0;
  virtual std::vector<Row> query(const QuerySpec& spec) = 0;
  virtual ScaleOutResult scale_out() = 0;
  /// On-disk bytes S_d; meaningful after flush().
  virtual std::int64_t disk_usage() = 0;
  virtual void flush() = 0;
  /// Drops all stored data and restores the initial topology.
  virtual void cleanup() = 0;

  /// Whether stored points can be read back (enables cross-client verification).
  virtual bool retains_data() const { return true; }
  /// Points currently held, when the adapter can count them.
  virtual std::optional<std::int64_t> stored_points() { return std::nullopt; }
  /// Adapters that model time instead of spending it expose their clock here.
  virtual SimulatedClock* simulated_clock() { return nullptr; }
};

/// A client connection to an adapter. Connections are cheap handles; the
/// driver gives each client its own and verifies reads through a different one.
class Session {
 public:
  Session(std::shared_ptr<SutAdapter> adapter, int client_id) : adapter_(std::move(adapter)), client_id_(client_id) {}

  InsertAck insert(std::span<const DataPoint> batch) { return adapter_->insert(batch); }
  std::vector<Row> query(const QuerySpec& spec) { return adapter_->query(spec); }
  int client_id() const noexcept { return client_id_; }

 private:
  std::shared_ptr<SutAdapter> adapter_;
  int client_id_;
};

/// Adapter options: the `sut.*` config keys with the prefix stripped.
using SutOptions = std::map<std::string, std::string>;
using AdapterFactory = std::function<std::shared_ptr<SutAdapter>(const SutOptions&)>;

/// Registers a factory under `name` (config key `sut.adapter`). The built-in
/// `reference` and `modeled` adapters are always present.
void register_adapter(const std::string& name, AdapterFactory factory);
bool has_adapter(const std::string& name);
std::vector<std::string> adapter_names();

/// Creates an adapter; unknown names or options raise InvalidParameter.
std::shared_ptr<SutAdapter> make_adapter(const std::string& name, const SutOptions& options);

/// Linear-scan evaluation of the query templates over an in-memory point set.
/// Serves as the correctness oracle for adapters.
std::vector<Row> brute_force_query(std::span<const DataPoint> points, const QuerySpec& spec,
                                   AggFunction downsample_agg = AggFunction::avg);

}  // namespace iotbench::sut
