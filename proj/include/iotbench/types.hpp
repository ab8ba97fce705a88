#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace iotbench {

/// Milliseconds since the Unix epoch.
using Timestamp = std::int64_t;

enum class ValueKind : std::uint8_t { integer = 0, float64 = 1, string = 2 };

using Value = std::variant<std::int64_t, double, std::string>;

std::string_view to_string(ValueKind kind);
ValueKind value_kind_from_string(std::string_view name);
ValueKind kind_of(const Value& v);

/// Bytes the value contributes to the ingested volume: 8 for numbers, byte length for strings.
std::int64_t payload_size(const Value& v);

/// Orders two values of the same kind. Mixed integer/float compare numerically;
/// strings compare lexicographically and never equal a number.
int compare_values(const Value& a, const Value& b);

/// Bitwise equality (doubles compared by bit pattern).
bool identical(const Value& a, const Value& b);

std::string format_value(const Value& v);

struct DataPoint {
  std::string sensor_id;
  Timestamp timestamp = 0;
  Value value;
  std::int64_t encoded_size = 8;

  static DataPoint make(std::string sensor, Timestamp ts, Value v) {
    auto size = payload_size(v);
    return DataPoint{std::move(sensor), ts, std::move(v), size};
  }
};

bool identical(const DataPoint& a, const DataPoint& b);

/// Base class for every error the harness raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter failed validation; `field()` names it.
class InvalidParameter : public Error {
 public:
  InvalidParameter(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)), reason_(what) {}
  const std::string& field() const noexcept { return field_; }
  /// The message without the field prefix.
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string field_;
  std::string reason_;
};

}  // namespace iotbench
