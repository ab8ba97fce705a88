#pragma once

// Plot-ready CSV curves from the analytic models.

#include <string>
#include <vector>

#include "iotbench/metrics.hpp"

namespace iotbench::sweep {

struct Curve {
  double w_s = 1.0;
  LawMode mode = LawMode::linear;
};

/// Parses "1..10" or "1,2,5" into integers.
std::vector<int> parse_int_grid(std::string_view text);
std::vector<double> parse_double_grid(std::string_view text);
/// Parses "1.0:linear,0.9:decaying".
std::vector<Curve> parse_curves(std::string_view text);

/// Columns m,w_s,mode,iotps_kiotps; one row per curve and m.
std::string scalability_csv(double rate_kiotps, const std::vector<int>& ms, const std::vector<Curve>& curves,
                            double t0 = 1, double ts = 1);

/// Columns r,storage_cost,total_cost.
std::string cost_csv(const CostModel& cost, double iotps, const std::vector<double>& ratios);

/// Columns r,usd_per_kiotps.
std::string price_csv(const CostModel& cost, double iotps, const std::vector<double>& ratios);

}  // namespace iotbench::sweep
