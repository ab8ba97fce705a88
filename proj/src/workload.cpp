#include "iotbench/workload.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace iotbench::workload {

using datagen::derive_seed;
using datagen::RandomSource;

std::string_view to_string(DataMethod m) {
  switch (m) {
    case DataMethod::distribution: return "distribution";
    case DataMethod::replay: return "replay";
    case DataMethod::model: return "model";
  }
  return "?";
}

DataMethod data_method_from_string(std::string_view s) {
  if (s == "distribution") return DataMethod::distribution;
  if (s == "replay") return DataMethod::replay;
  if (s == "model") return DataMethod::model;
  throw InvalidParameter("datagen.method", "unknown method '" + std::string(s) + "'");
}

SensorSpace SensorSpace::build(std::size_t sensor_count, const DataConfig& data, std::uint64_t seed) {
  if (sensor_count == 0) throw InvalidParameter("sensors", "need at least one sensor");
  SensorSpace space;
  space.sensors_.reserve(sensor_count);

  ValueKind sample_kind = ValueKind::float64;
  double sample_lo = 0, sample_hi = 0;
  if (data.method == DataMethod::replay) {
    if (!data.sample || data.sample->sets.empty()) throw Error("replay method needs a loaded sample");
    sample_kind = kind_of(data.sample->sets.front().front().value);
    bool first = true;
    for (const auto& set : data.sample->sets)
      for (const auto& p : set) {
        if (kind_of(p.value) == ValueKind::string) continue;
        double v = std::holds_alternative<double>(p.value) ? std::get<double>(p.value)
                                                           : static_cast<double>(std::get<std::int64_t>(p.value));
        sample_lo = first ? v : std::min(sample_lo, v);
        sample_hi = first ? v : std::max(sample_hi, v);
        first = false;
      }
  } else if (data.method == DataMethod::model && !data.model) {
    throw Error("model method needs a fitted generator model");
  } else if (data.kinds.empty()) {
    throw InvalidParameter("datagen.value_kinds", "need at least one value kind");
  }

  for (std::size_t i = 0; i < sensor_count; ++i) {
    SensorInfo info;
    info.id = "sensor_" + std::to_string(i);
    switch (data.method) {
      case DataMethod::distribution: {
        info.kind = data.kinds[derive_seed(seed, i) % data.kinds.size()];
        if (info.kind != ValueKind::string) {
          auto [lo, hi] = datagen::nominal_range(info.kind == ValueKind::integer ? data.int_dist : data.float_dist);
          info.range_lo = lo;
          info.range_hi = hi;
        }
        break;
      }
      case DataMethod::replay:
        info.kind = sample_kind;
        info.range_lo = sample_lo;
        info.range_hi = sample_hi;
        break;
      case DataMethod::model:
        info.kind = ValueKind::float64;
        info.range_lo = data.model->quantile_table.front();
        info.range_hi = data.model->quantile_table.back();
        break;
    }
    if (info.kind == ValueKind::integer) {
      info.range_lo = std::ceil(info.range_lo);
      info.range_hi = std::max(info.range_lo, std::floor(info.range_hi));
    }
    if (info.kind != ValueKind::string) space.numeric_.push_back(i);
    space.sensors_.push_back(std::move(info));
  }
  return space;
}

const SensorInfo* SensorSpace::find(std::string_view id) const {
  constexpr std::string_view prefix = "sensor_";
  if (id.substr(0, prefix.size()) != prefix) return nullptr;
  std::size_t idx = 0;
  auto digits = id.substr(prefix.size());
  if (digits.empty() || (digits.size() > 1 && digits.front() == '0')) return nullptr;
  for (char c : digits) {
    if (c < '0' || c > '9') return nullptr;
    idx = idx * 10 + static_cast<std::size_t>(c - '0');
    if (idx >= sensors_.size()) return nullptr;
  }
  return &sensors_[idx];
}

Allocation allocate_records(std::int64_t total_records, int k) {
  if (k < 2) throw InvalidParameter("clients", "the scalability test needs at least 2 clients (one standby)");
  const std::int64_t denom = 2 * static_cast<std::int64_t>(k) - 1;
  if (total_records < denom)
    throw InvalidParameter("records", "need at least 2k-1 = " + std::to_string(denom) + " records");
  Allocation a;
  a.k = k;
  a.total = total_records;
  const std::int64_t standard = 2 * total_records / denom;
  a.per_client.assign(static_cast<std::size_t>(k - 1), standard);
  a.per_client.push_back(total_records - standard * (k - 1));
  a.scale_out_client_index = k - 1;
  return a;
}

void QueryMix::validate() const {
  if (!(query_fraction >= 0 && query_fraction < 1)) throw InvalidParameter("query_fraction", "must be in [0, 1)");
  double sum = 0;
  for (double w : template_weights) {
    if (!(w >= 0)) throw InvalidParameter("template_weights", "weights must be nonnegative");
    sum += w;
  }
  if (!(sum > 0)) throw InvalidParameter("template_weights", "weights must have a positive sum");
  if (min_sensors < 1 || min_sensors > max_sensors)
    throw InvalidParameter("query_sensors", "need 1 <= min <= max sensors per query");
}

namespace {

std::vector<std::string> pick_sensors(RandomSource& rng, const SensorSpace& space, const std::vector<std::size_t>* pool,
                                      const QueryMix& mix) {
  std::size_t available = pool ? pool->size() : space.size();
  std::size_t hi = std::min(mix.max_sensors, available);
  std::size_t lo = std::min(mix.min_sensors, hi);
  auto count = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)));
  std::vector<std::size_t> chosen;
  while (chosen.size() < count) {
    auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(available) - 1));
    std::size_t idx = pool ? (*pool)[j] : j;
    if (std::find(chosen.begin(), chosen.end(), idx) == chosen.end()) chosen.push_back(idx);
  }
  std::vector<std::string> out;
  for (auto idx : chosen) out.push_back(space.at(idx).id);
  return out;
}

}  // namespace

QuerySpec gen_query(QueryTemplate tmpl, RandomSource& rng, const SensorSpace& space, TimeWindow window,
                    const QueryMix& mix) {
  if (window.empty()) throw Error("gen_query: no data ingested yet (empty time window)");
  if (tmpl != QueryTemplate::time_range && space.numeric().empty()) tmpl = QueryTemplate::time_range;

  QuerySpec spec;
  spec.kind = tmpl;
  const std::int64_t span = window.hi - window.lo;
  const std::int64_t min_width = std::min<std::int64_t>(1000, span);
  const std::int64_t max_width = std::max<std::int64_t>(min_width, span / 20);
  const std::int64_t width = rng.uniform_int(min_width, max_width);
  spec.t_start = rng.uniform_int(window.lo, window.hi - width);
  spec.t_end = spec.t_start + width;
  spec.sensors = pick_sensors(rng, space, tmpl == QueryTemplate::time_range ? nullptr : &space.numeric(), mix);

  switch (tmpl) {
    case QueryTemplate::time_range:
      break;
    case QueryTemplate::aggregation: {
      auto mask = rng.uniform_int(1, (1 << kAggFunctionCount) - 1);
      for (std::size_t f = 0; f < kAggFunctionCount; ++f)
        if (mask & (1 << f)) spec.functions.push_back(static_cast<AggFunction>(f));
      break;
    }
    case QueryTemplate::downsample:
      spec.unit = std::max<Timestamp>(1, width / rng.uniform_int(2, 20));
      break;
    case QueryTemplate::filtered: {
      const auto& target = spec.sensors[static_cast<std::size_t>(rng.uniform_int(0, spec.sensors.size() - 1))];
      const SensorInfo* info = space.find(target);
      Condition cond;
      cond.sensor = target;
      cond.op = static_cast<CompareOp>(rng.uniform_int(0, 5));
      double v = info->range_lo + (info->range_hi - info->range_lo) * rng.uniform01();
      if (info->kind == ValueKind::integer)
        cond.value = static_cast<std::int64_t>(std::clamp(std::nearbyint(v), info->range_lo, info->range_hi));
      else
        cond.value = std::clamp(v, info->range_lo, info->range_hi);
      spec.cond = std::move(cond);
      break;
    }
  }
  return spec;
}

bool conforms(const QuerySpec& spec, const SensorSpace& space) {
  try {
    spec.validate();
  } catch (const InvalidParameter&) {
    return false;
  }
  for (const auto& s : spec.sensors)
    if (!space.find(s)) return false;
  if (spec.kind == QueryTemplate::aggregation) {
    for (auto f : spec.functions)
      if (static_cast<std::size_t>(f) >= kAggFunctionCount) return false;
  }
  if (spec.kind == QueryTemplate::filtered) {
    const SensorInfo* info = space.find(spec.cond->sensor);
    if (!info || info->kind == ValueKind::string) return false;
    if (kind_of(spec.cond->value) != info->kind) return false;
    double v = info->kind == ValueKind::integer ? static_cast<double>(std::get<std::int64_t>(spec.cond->value))
                                                : std::get<double>(spec.cond->value);
    if (v < info->range_lo || v > info->range_hi) return false;
  }
  return true;
}

std::int64_t WorkloadOp::batch_bytes() const {
  std::int64_t total = 0;
  for (const auto& p : batch) total += p.encoded_size;
  return total;
}

SensorStream::State SensorStream::make_state(const SensorInfo& info, const DataConfig& data,
                                             std::size_t thread_index, std::uint64_t seed) {
  switch (data.method) {
    case DataMethod::replay:
      return State(std::in_place_type<datagen::ReplayState>, *data.sample, thread_index, info.id, data.start_ts);
    case DataMethod::model:
      return State(std::in_place_type<datagen::SynthState>, info.id, data.start_ts, seed);
    case DataMethod::distribution:
      break;
  }
  datagen::ValueSpec vs;
  vs.kind = info.kind;
  vs.distribution = info.kind == ValueKind::integer ? data.int_dist : data.float_dist;
  vs.string_length = data.string_length;
  vs.max_len = data.max_string_len;
  return State(std::in_place_type<Parametric>,
               Parametric{datagen::TimestampState(data.spacing, data.start_ts, derive_seed(seed, 1)),
                          datagen::ValueGenerator(vs, derive_seed(seed, 2))});
}

SensorStream::SensorStream(const SensorInfo& info, const DataConfig& data, std::size_t thread_index,
                           std::uint64_t seed)
    : id_(info.id),
      spacing_(data.spacing),
      sample_(data.sample),
      model_(data.model),
      state_(make_state(info, data, thread_index, seed)) {}

DataPoint SensorStream::next() {
  if (auto* p = std::get_if<Parametric>(&state_)) {
    Timestamp ts = datagen::next_timestamp(spacing_, p->clock);
    return DataPoint::make(id_, ts, p->values.next());
  }
  if (auto* r = std::get_if<datagen::ReplayState>(&state_)) return datagen::replay_next(*sample_, *r);
  return datagen::synth_next(*model_, std::get<datagen::SynthState>(state_));
}

ClientWorkload::ClientWorkload(std::shared_ptr<const SensorSpace> space, const DataConfig& data, ClientConfig config)
    : space_(std::move(space)), config_(std::move(config)), rng_(derive_seed(config_.seed, 0xc11e47)) {
  config_.mix.validate();
  if (config_.batch_size == 0) throw InvalidParameter("batch_size", "must be positive");
  if (config_.sensors.empty()) throw InvalidParameter("sensors", "client " + std::to_string(config_.client_id) + " owns no sensors");
  streams_.reserve(config_.sensors.size());
  for (auto idx : config_.sensors)
    streams_.emplace_back(space_->at(idx), data, static_cast<std::size_t>(config_.thread_id),
                          derive_seed(config_.seed, 0x5e45000000ULL + idx));
  reset_budget(config_.budget);
}

void ClientWorkload::reset_budget(std::int64_t budget) {
  if (budget < 0) throw InvalidParameter("budget", "must be nonnegative");
  budget_ = budget;
  issued_ = 0;
}

std::optional<WorkloadOp> ClientWorkload::next_op(std::int64_t write_limit) {
  const std::int64_t cap = std::min(budget_, write_limit);
  if (issued_ >= cap) return std::nullopt;

  WorkloadOp op;
  op.client_id = config_.client_id;
  op.thread_id = config_.thread_id;
  const double u = rng_.uniform01();
  if (u < config_.mix.query_fraction && !window_.empty()) {
    const auto& w = config_.mix.template_weights;
    double pick = rng_.uniform01() * std::accumulate(w.begin(), w.end(), 0.0);
    std::size_t t = 0;
    while (t + 1 < kQueryTemplateCount && (pick -= w[t]) >= 0) ++t;
    while (w[t] == 0 && t > 0) --t;
    op.kind = WorkloadOp::Kind::query;
    op.query = gen_query(static_cast<QueryTemplate>(t), rng_, *space_, window_, config_.mix);
    return op;
  }

  const auto n = static_cast<std::size_t>(std::min<std::int64_t>(static_cast<std::int64_t>(config_.batch_size), cap - issued_));
  op.batch.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    op.batch.push_back(streams_[cursor_].next());
    window_.extend(op.batch.back().timestamp);
    cursor_ = (cursor_ + 1) % streams_.size();
  }
  issued_ += static_cast<std::int64_t>(n);
  return op;
}

}  // namespace iotbench::workload
