#pragma once

// Benchmark procedure: prerequisite checks, two iterations of warmup and
// measured runs (stable phase, scale-out, scale-out phase), data checks,
// cleanup and the final report.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iotbench/run_config.hpp"

namespace iotbench::driver {

inline constexpr const char* kHarnessVersion = "1.0.0";
inline constexpr int kReportSchemaVersion = 1;

struct CheckResult {
  std::string name;
  bool passed = false;
  bool skipped = false;
  std::string detail;

  bool operator==(const CheckResult&) const = default;
};

struct LatencySummary {
  std::int64_t count = 0;
  double mean_ms = 0;
  double p95_ms = 0;

  bool operator==(const LatencySummary&) const = default;
};

struct ClientProgress {
  int client_id = 0;
  std::int64_t budget = 0;
  std::int64_t ingested = 0;

  bool operator==(const ClientProgress&) const = default;
};

struct WarmupStats {
  double seconds = 0;  // W
  std::int64_t points = 0;
  std::int64_t bytes = 0;
  std::int64_t queries = 0;

  bool operator==(const WarmupStats&) const = default;
};

struct PhaseStats {
  std::int64_t n0 = 0;
  std::int64_t ns = 0;
  double t0 = 0;
  double ts = 0;
  std::int64_t ingested_bytes = 0;  // S_i of the measured run
  std::vector<ClientProgress> at_boundary;
  std::vector<ClientProgress> at_end;
  std::map<std::string, LatencySummary> queries;  // by template name
  std::vector<std::int64_t> instance_points;       // per driver instance

  std::int64_t points() const noexcept { return n0 + ns; }
  double duration() const noexcept { return t0 + ts; }

  bool operator==(const PhaseStats&) const = default;
};

struct IterationResult {
  int index = 0;
  bool model_fitted = false;
  WarmupStats warmup;
  PhaseStats measured;
  double duration = 0;  // T_i
  bool scaled_out = false;
  int nodes_before = 0;
  int nodes_after = 0;
  std::int64_t stored_bytes = 0;  // all bytes written to the SUT this iteration
  std::int64_t disk_bytes = 0;    // S_d
  double compression_ratio = 0;
  std::vector<CheckResult> checks;
  bool valid = false;
  std::string error;

  bool operator==(const IterationResult&) const = default;
};

struct Metrics {
  double iotps = 0;
  double compression_ratio = 0;
  double storage_cost = 0;
  double system_cost = 0;
  double usd_per_kiotps = 0;

  bool operator==(const Metrics&) const = default;
};

struct BenchmarkReport {
  int schema_version = kReportSchemaVersion;
  std::string harness_version = kHarnessVersion;
  std::vector<std::pair<std::string, std::string>> config;  // every RunConfig key
  std::vector<std::int64_t> allocation;
  std::vector<CheckResult> prerequisites;
  std::vector<IterationResult> iterations;
  std::optional<Metrics> metrics;
  int model_fits = 0;
  bool scale_out_skipped = false;
  std::string failure_stage;  // empty when the run is valid
  std::string started_at;
  std::string finished_at;

  /// Every check in run order.
  std::vector<CheckResult> checks() const;
  /// 0 all checks pass, 1 benchmark-invalidating failure, 2 config error.
  int exit_code() const;

  bool operator==(const BenchmarkReport&) const = default;
};

struct RunOptions {
  std::ostream* log = nullptr;  // progress lines
  std::optional<std::string> output_dir;
};

std::vector<CheckResult> prerequisite_checks(const RunConfig& config, const RunOptions& options = {});

/// Passes iff N_p / (m_s * T) >= min_rate.
CheckResult min_rate_gate_check(std::int64_t points, int sensors, double seconds, double min_rate);

BenchmarkReport run_benchmark(const RunConfig& config, const RunOptions& options = {});

}  // namespace iotbench::driver
