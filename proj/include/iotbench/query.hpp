#pragma once

// The four dashboard query templates and their result rows.

#include <optional>
#include <string>
#include <vector>

#include "iotbench/types.hpp"

namespace iotbench {

enum class QueryTemplate : std::uint8_t { time_range = 0, aggregation = 1, downsample = 2, filtered = 3 };
inline constexpr std::size_t kQueryTemplateCount = 4;

enum class AggFunction : std::uint8_t { avg = 0, max = 1, min = 2, first = 3, last = 4 };
inline constexpr std::size_t kAggFunctionCount = 5;

enum class CompareOp : std::uint8_t { eq, lt, gt, le, ge, ne };

std::string_view to_string(QueryTemplate t);
std::string_view to_string(AggFunction f);
std::string_view to_string(CompareOp op);
QueryTemplate query_template_from_string(std::string_view s);
AggFunction agg_function_from_string(std::string_view s);

bool compare(const Value& lhs, CompareOp op, const Value& rhs);

struct Condition {
  std::string sensor;  // s_v
  CompareOp op = CompareOp::eq;
  Value value;
};

struct QuerySpec {
  QueryTemplate kind = QueryTemplate::time_range;
  std::vector<std::string> sensors;
  Timestamp t_start = 0;
  Timestamp t_end = 0;
  std::vector<AggFunction> functions;  // aggregation
  Timestamp unit = 0;                  // downsample bucket width (ms)
  std::optional<Condition> cond;       // filtered

  /// Structural checks; throws InvalidParameter.
  void validate() const;
  std::string describe() const;
};

/// One result row. Raw observations carry an empty label; aggregates carry the
/// function name and, for aggregation, t_start as timestamp; downsample rows
/// carry their bucket start.
struct Row {
  std::string sensor_id;
  Timestamp timestamp = 0;
  std::string label;
  Value value;
};

bool identical(const Row& a, const Row& b);
bool identical(const std::vector<Row>& a, const std::vector<Row>& b);

/// Sensor list deduplicated and sorted, the order rows are reported in.
std::vector<std::string> normalized_sensors(const QuerySpec& spec);
/// Aggregation functions deduplicated in declaration order.
std::vector<AggFunction> normalized_functions(const QuerySpec& spec);

/// Start of the bucket containing `ts`; buckets are aligned to t_start.
inline Timestamp bucket_start(Timestamp ts, Timestamp t_start, Timestamp unit) {
  return t_start + ((ts - t_start) / unit) * unit;
}

}  // namespace iotbench
