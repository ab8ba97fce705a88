#include "iotbench/types.hpp"

#include <bit>
#include <cstdio>

namespace iotbench {

std::string_view to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::integer: return "integer";
    case ValueKind::float64: return "float64";
    case ValueKind::string: return "string";
  }
  return "?";
}

ValueKind value_kind_from_string(std::string_view name) {
  if (name == "integer" || name == "int") return ValueKind::integer;
  if (name == "float64" || name == "float") return ValueKind::float64;
  if (name == "string") return ValueKind::string;
  throw InvalidParameter("value_kind", "unknown value kind '" + std::string(name) + "'");
}

ValueKind kind_of(const Value& v) {
  return static_cast<ValueKind>(v.index());
}

std::int64_t payload_size(const Value& v) {
  if (auto* s = std::get_if<std::string>(&v)) return static_cast<std::int64_t>(s->size());
  return 8;
}

int compare_values(const Value& a, const Value& b) {
  auto* sa = std::get_if<std::string>(&a);
  auto* sb = std::get_if<std::string>(&b);
  if (sa && sb) return sa->compare(*sb) < 0 ? -1 : (*sa == *sb ? 0 : 1);
  if (sa) return 1;
  if (sb) return -1;
  auto* ia = std::get_if<std::int64_t>(&a);
  auto* ib = std::get_if<std::int64_t>(&b);
  if (ia && ib) return *ia < *ib ? -1 : (*ia == *ib ? 0 : 1);
  double da = ia ? static_cast<double>(*ia) : std::get<double>(a);
  double db = ib ? static_cast<double>(*ib) : std::get<double>(b);
  return da < db ? -1 : (da == db ? 0 : 1);
}

bool identical(const Value& a, const Value& b) {
  if (a.index() != b.index()) return false;
  if (auto* da = std::get_if<double>(&a))
    return std::bit_cast<std::uint64_t>(*da) == std::bit_cast<std::uint64_t>(std::get<double>(b));
  return a == b;
}

bool identical(const DataPoint& a, const DataPoint& b) {
  return a.sensor_id == b.sensor_id && a.timestamp == b.timestamp &&
         a.encoded_size == b.encoded_size && identical(a.value, b.value);
}

std::string format_value(const Value& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (auto* d = std::get_if<double>(&v)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  return std::get<std::string>(v);
}

}  // namespace iotbench
