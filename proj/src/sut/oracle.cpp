#include <algorithm>
#include <set>

#include "iotbench/sut.hpp"

namespace iotbench::sut {

namespace {

double as_double(const Value& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::get<double>(v);
}

// nullopt for avg over strings
std::optional<Value> aggregate(const std::vector<const DataPoint*>& pts, AggFunction f) {
  switch (f) {
    case AggFunction::avg: {
      if (std::holds_alternative<std::string>(pts.front()->value)) return std::nullopt;
      double sum = 0;
      for (auto* p : pts) sum += as_double(p->value);
      return sum / static_cast<double>(pts.size());
    }
    case AggFunction::max: {
      const Value* best = &pts.front()->value;
      for (auto* p : pts)
        if (compare_values(p->value, *best) > 0) best = &p->value;
      return *best;
    }
    case AggFunction::min: {
      const Value* best = &pts.front()->value;
      for (auto* p : pts)
        if (compare_values(p->value, *best) < 0) best = &p->value;
      return *best;
    }
    case AggFunction::first: return pts.front()->value;
    case AggFunction::last: return pts.back()->value;
  }
  return std::nullopt;
}

}  // namespace

std::vector<Row> brute_force_query(std::span<const DataPoint> points, const QuerySpec& spec,
                                   AggFunction downsample_agg) {
  spec.validate();
  auto in_range = [&](const DataPoint& p) { return p.timestamp >= spec.t_start && p.timestamp <= spec.t_end; };
  auto select = [&](const std::string& sensor) {
    std::vector<const DataPoint*> out;
    for (const auto& p : points)
      if (p.sensor_id == sensor && in_range(p)) out.push_back(&p);
    std::stable_sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->timestamp < b->timestamp; });
    return out;
  };

  std::set<Timestamp> matching;
  if (spec.kind == QueryTemplate::filtered) {
    for (auto* p : select(spec.cond->sensor))
      if (compare(p->value, spec.cond->op, spec.cond->value)) matching.insert(p->timestamp);
  }

  std::vector<Row> rows;
  for (const auto& sensor : normalized_sensors(spec)) {
    auto pts = select(sensor);
    switch (spec.kind) {
      case QueryTemplate::time_range:
        for (auto* p : pts) rows.push_back({sensor, p->timestamp, "", p->value});
        break;
      case QueryTemplate::filtered:
        for (auto* p : pts)
          if (matching.count(p->timestamp)) rows.push_back({sensor, p->timestamp, "", p->value});
        break;
      case QueryTemplate::aggregation:
        if (pts.empty()) break;
        for (auto f : normalized_functions(spec))
          if (auto v = aggregate(pts, f)) rows.push_back({sensor, spec.t_start, std::string(to_string(f)), *v});
        break;
      case QueryTemplate::downsample: {
        if (pts.empty() || std::holds_alternative<std::string>(pts.front()->value)) break;
        std::map<Timestamp, std::vector<const DataPoint*>> buckets;
        for (auto* p : pts) buckets[bucket_start(p->timestamp, spec.t_start, spec.unit)].push_back(p);
        for (const auto& [start, members] : buckets)
          rows.push_back({sensor, start, std::string(to_string(downsample_agg)), *aggregate(members, downsample_agg)});
        break;
      }
    }
  }
  return rows;
}

}  // namespace iotbench::sut
