#include "iotbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "iotbench/types.hpp"

namespace iotbench {

namespace {

void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) throw InvalidParameter(field, "must be finite");
}

}  // namespace

std::string_view to_string(LawMode mode) { return mode == LawMode::linear ? "linear" : "decaying"; }

LawMode law_mode_from_string(std::string_view s) {
  if (s == "linear") return LawMode::linear;
  if (s == "decaying") return LawMode::decaying;
  throw InvalidParameter("mode", "expected linear or decaying, got '" + std::string(s) + "'");
}

double linearity_factor(double w_s, int m, LawMode mode) {
  return mode == LawMode::linear ? w_s : std::pow(w_s, m);
}

double compression_ratio(double ingested_bytes, double disk_bytes) {
  if (!(disk_bytes > 0)) throw InvalidParameter("S_d", "on-disk size must be positive");
  if (ingested_bytes < 0) throw InvalidParameter("S_i", "must not be negative");
  return ingested_bytes / disk_bytes;
}

double CompressionStats::ratio() const {
  return compression_ratio(static_cast<double>(ingested_bytes), static_cast<double>(disk_bytes));
}

double iotps(double points, double t1, double t2) {
  if (!(t1 > 0) || !(t2 > 0)) throw InvalidParameter("T", "run durations must be positive");
  if (points < 0) throw InvalidParameter("N_p", "must not be negative");
  return points / std::max(t1, t2);
}

void ScalabilityInputs::validate() const {
  require_finite(rate, "R");
  if (rate < 0) throw InvalidParameter("R", "must not be negative");
  if (m < 1) throw InvalidParameter("m", "must be at least 1");
  if (!(w_s > 0 && w_s <= 1)) throw InvalidParameter("w_s", "must be in (0, 1]");
  if (!(t0 > 0) || !(ts > 0)) throw InvalidParameter("t0/ts", "phase durations must be positive");
}

double model_iotps(const ScalabilityInputs& in) {
  in.validate();
  const double gain = (static_cast<double>(in.m) + 1) / in.m * linearity_factor(in.w_s, in.m, in.mode);
  return (in.ts * in.rate * gain + in.rate * in.t0) / (in.t0 + in.ts);
}

void CostModel::validate() const {
  for (auto [v, name] : {std::pair{c0, "c0"}, {cs, "cs"}, {storage_component_cost, "C0"}}) {
    require_finite(v, name);
    if (v < 0) throw InvalidParameter(name, "must not be negative");
  }
  if (!(storage_capacity_bytes > 0)) throw InvalidParameter("S0", "must be positive");
  if (!(interval_weight > 0)) throw InvalidParameter("w_i", "must be positive");
  if (!(interval_seconds > 0)) throw InvalidParameter("interval_seconds", "must be positive");
  if (!(per_record_storage_cost >= 0)) throw InvalidParameter("per_record_storage_cost", "must not be negative");
  if (!(record_bytes > 0)) throw InvalidParameter("record_bytes", "must be positive");
}

double CostModel::system_cost() const { return 0.5 * c0 + 0.5 * cs; }

double CostModel::record_cost() const { return per_record_storage_cost * record_bytes / 16.0; }

double storage_cost(const CostModel& cost, double iotps, double r) {
  if (!(r > 0)) throw InvalidParameter("r", "compression ratio must be positive");
  if (iotps < 0) throw InvalidParameter("iotps", "must not be negative");
  return cost.interval_weight * cost.interval_seconds * iotps * cost.record_cost() / r;
}

double price_performance(const CostModel& cost, double iotps, double r, double ingested_bytes) {
  cost.validate();
  if (!(iotps > 0)) throw InvalidParameter("iotps", "must be positive");
  if (cost.storage_capacity_bytes < ingested_bytes)
    throw InvalidParameter("S0", "storage capacity is smaller than the ingested volume S_i");
  return (cost.system_cost() + storage_cost(cost, iotps, r)) / (iotps / 1000.0);
}

double storage_crossover_ratio(const CostModel& cost, double iotps) {
  cost.validate();
  if (!(cost.system_cost() > 0)) throw InvalidParameter("c0/cs", "system cost must be positive");
  return storage_cost(cost, iotps, 1.0) / cost.system_cost();
}

double ingest_rate_per_sensor(double points, int sensors, double seconds) {
  if (sensors < 1) throw InvalidParameter("sensors", "must be at least 1");
  if (!(seconds > 0)) throw InvalidParameter("T", "must be positive");
  return points / (sensors * seconds);
}

bool min_rate_gate(double points, int sensors, double seconds, double min_rate) {
  return ingest_rate_per_sensor(points, sensors, seconds) >= min_rate;
}

}  // namespace iotbench
