#include "iotbench/query.hpp"

#include <algorithm>
#include <sstream>

namespace iotbench {

std::string_view to_string(QueryTemplate t) {
  switch (t) {
    case QueryTemplate::time_range: return "time_range";
    case QueryTemplate::aggregation: return "aggregation";
    case QueryTemplate::downsample: return "downsample";
    case QueryTemplate::filtered: return "filtered";
  }
  return "?";
}

std::string_view to_string(AggFunction f) {
  switch (f) {
    case AggFunction::avg: return "avg";
    case AggFunction::max: return "max";
    case AggFunction::min: return "min";
    case AggFunction::first: return "first";
    case AggFunction::last: return "last";
  }
  return "?";
}

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::eq: return "=";
    case CompareOp::lt: return "<";
    case CompareOp::gt: return ">";
    case CompareOp::le: return "<=";
    case CompareOp::ge: return ">=";
    case CompareOp::ne: return "!=";
  }
  return "?";
}

QueryTemplate query_template_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kQueryTemplateCount; ++i)
    if (to_string(static_cast<QueryTemplate>(i)) == s) return static_cast<QueryTemplate>(i);
  throw InvalidParameter("template", "unknown query template '" + std::string(s) + "'");
}

AggFunction agg_function_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kAggFunctionCount; ++i)
    if (to_string(static_cast<AggFunction>(i)) == s) return static_cast<AggFunction>(i);
  throw InvalidParameter("function", "unknown aggregate '" + std::string(s) + "'");
}

bool compare(const Value& lhs, CompareOp op, const Value& rhs) {
  bool lhs_str = std::holds_alternative<std::string>(lhs);
  bool rhs_str = std::holds_alternative<std::string>(rhs);
  if (lhs_str != rhs_str) return op == CompareOp::ne;
  int c = compare_values(lhs, rhs);
  switch (op) {
    case CompareOp::eq: return c == 0;
    case CompareOp::lt: return c < 0;
    case CompareOp::gt: return c > 0;
    case CompareOp::le: return c <= 0;
    case CompareOp::ge: return c >= 0;
    case CompareOp::ne: return c != 0;
  }
  return false;
}

void QuerySpec::validate() const {
  if (sensors.empty()) throw InvalidParameter("sensors", "query needs at least one sensor");
  if (t_start > t_end) throw InvalidParameter("t_start", "t_start must not exceed t_end");
  switch (kind) {
    case QueryTemplate::time_range: break;
    case QueryTemplate::aggregation:
      if (functions.empty()) throw InvalidParameter("functions", "aggregation needs at least one function");
      break;
    case QueryTemplate::downsample:
      if (unit <= 0) throw InvalidParameter("unit", "downsample unit must be positive");
      break;
    case QueryTemplate::filtered:
      if (!cond) throw InvalidParameter("cond", "filtered query needs a condition");
      if (cond->sensor.empty()) throw InvalidParameter("cond", "condition needs a sensor");
      break;
  }
}

std::string QuerySpec::describe() const {
  std::ostringstream out;
  out << to_string(kind) << " [" << t_start << "," << t_end << "] sensors=";
  for (std::size_t i = 0; i < sensors.size(); ++i) out << (i ? "|" : "") << sensors[i];
  if (kind == QueryTemplate::aggregation) {
    out << " F=";
    for (std::size_t i = 0; i < functions.size(); ++i) out << (i ? "|" : "") << to_string(functions[i]);
  }
  if (kind == QueryTemplate::downsample) out << " unit=" << unit;
  if (cond) out << " cond=" << cond->sensor << to_string(cond->op) << format_value(cond->value);
  return out.str();
}

bool identical(const Row& a, const Row& b) {
  return a.sensor_id == b.sensor_id && a.timestamp == b.timestamp && a.label == b.label &&
         identical(a.value, b.value);
}

bool identical(const std::vector<Row>& a, const std::vector<Row>& b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](const Row& x, const Row& y) {
           return identical(x, y);
         });
}

std::vector<std::string> normalized_sensors(const QuerySpec& spec) {
  std::vector<std::string> out = spec.sensors;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<AggFunction> normalized_functions(const QuerySpec& spec) {
  std::vector<AggFunction> out;
  for (std::size_t i = 0; i < kAggFunctionCount; ++i) {
    auto f = static_cast<AggFunction>(i);
    if (std::find(spec.functions.begin(), spec.functions.end(), f) != spec.functions.end()) out.push_back(f);
  }
  return out;
}

}  // namespace iotbench
