#include "iotbench/sweep.hpp"

#include <charconv>

#include "iotbench/config.hpp"
#include "iotbench/types.hpp"

namespace iotbench::sweep {

namespace {

using driver::format_number;

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  while (!text.empty()) {
    auto pos = text.find(sep);
    out.push_back(text.substr(0, pos));
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return out;
}

template <class T>
T number(std::string_view s, const char* field) {
  T out{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidParameter(field, "not a number: '" + std::string(s) + "'");
  return out;
}

}  // namespace

std::vector<int> parse_int_grid(std::string_view text) {
  std::vector<int> out;
  if (text.empty()) return out;
  if (auto dots = text.find(".."); dots != std::string_view::npos) {
    int lo = number<int>(text.substr(0, dots), "grid");
    int hi = number<int>(text.substr(dots + 2), "grid");
    if (lo > hi) throw InvalidParameter("grid", "range start exceeds end");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  for (auto item : split(text, ',')) out.push_back(number<int>(item, "grid"));
  return out;
}

std::vector<double> parse_double_grid(std::string_view text) {
  std::vector<double> out;
  if (text.empty()) return out;
  for (auto item : split(text, ',')) out.push_back(number<double>(item, "grid"));
  return out;
}

std::vector<Curve> parse_curves(std::string_view text) {
  std::vector<Curve> out;
  if (text.empty()) return out;
  for (auto item : split(text, ',')) {
    auto colon = item.find(':');
    if (colon == std::string_view::npos) throw InvalidParameter("curves", "expected w_s:mode, got '" + std::string(item) + "'");
    Curve c{number<double>(item.substr(0, colon), "curves"), law_mode_from_string(item.substr(colon + 1))};
    if (!(c.w_s > 0 && c.w_s <= 1)) throw InvalidParameter("curves", "w_s must be in (0, 1]");
    out.push_back(c);
  }
  return out;
}

std::string scalability_csv(double rate_kiotps, const std::vector<int>& ms, const std::vector<Curve>& curves,
                            double t0, double ts) {
  std::string out = "m,w_s,mode,iotps_kiotps\n";
  for (const auto& c : curves)
    for (int m : ms) {
      double v = model_iotps({rate_kiotps, m, c.w_s, c.mode, t0, ts});
      out += std::to_string(m) + "," + format_number(c.w_s) + "," + std::string(to_string(c.mode)) + "," +
             format_number(v) + "\n";
    }
  return out;
}

std::string cost_csv(const CostModel& cost, double iotps, const std::vector<double>& ratios) {
  cost.validate();
  std::string out = "r,storage_cost,total_cost\n";
  for (double r : ratios) {
    double s = storage_cost(cost, iotps, r);
    out += format_number(r) + "," + format_number(s) + "," + format_number(s + cost.system_cost()) + "\n";
  }
  return out;
}

std::string price_csv(const CostModel& cost, double iotps, const std::vector<double>& ratios) {
  std::string out = "r,usd_per_kiotps\n";
  for (double r : ratios) out += format_number(r) + "," + format_number(price_performance(cost, iotps, r)) + "\n";
  return out;
}

}  // namespace iotbench::sweep
