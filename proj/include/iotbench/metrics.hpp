#pragma once

// IoTps, compression ratio, price/performance and the analytic scalability model.

#include <cstdint>
#include <string_view>

namespace iotbench {

enum class LawMode { linear, decaying };

std::string_view to_string(LawMode mode);
LawMode law_mode_from_string(std::string_view s);

/// Realized fraction of the ideal (m+1)/m gain: w_s, or w_s^m when decaying.
double linearity_factor(double w_s, int m, LawMode mode);

struct CompressionStats {
  std::int64_t ingested_bytes = 0;  // S_i
  std::int64_t disk_bytes = 0;      // S_d
  double ratio() const;
};

double compression_ratio(double ingested_bytes, double disk_bytes);

/// N_p / max(T1, T2).
double iotps(double points, double t1, double t2);

struct ScalabilityInputs {
  double rate = 0;  // R = n0 / t0
  int m = 1;
  double w_s = 1.0;
  LawMode mode = LawMode::linear;
  double t0 = 1;
  double ts = 1;

  void validate() const;
};

double model_iotps(const ScalabilityInputs& in);

struct CostModel {
  double storage_component_cost = 0;     // C_0, echoed
  double storage_capacity_bytes = 1e15;  // S_0
  double c0 = 300000;
  double cs = 300000;
  double interval_weight = 17520;  // w_i = 2 * 24 * 365
  double interval_seconds = 1800;
  double per_record_storage_cost = 2.039e-08;  // per 16-byte record
  double record_bytes = 16;

  void validate() const;
  /// ½c0 + ½cs.
  double system_cost() const;
  double record_cost() const;
};

/// Yearly ingest at `iotps` times the uncompressed record cost, divided by r.
double storage_cost(const CostModel& cost, double iotps, double r);

/// Total cost per kIoTps. Raises InvalidParameter when S_0 < S_i.
double price_performance(const CostModel& cost, double iotps, double r, double ingested_bytes = 0);

/// Compression ratio at which storage cost equals the system cost.
double storage_crossover_ratio(const CostModel& cost, double iotps);

/// Average points per sensor per second: N_p / (m_s * T).
double ingest_rate_per_sensor(double points, int sensors, double seconds);
bool min_rate_gate(double points, int sensors, double seconds, double min_rate = 20);

}  // namespace iotbench
