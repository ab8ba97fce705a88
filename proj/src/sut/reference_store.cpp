#include "iotbench/reference_store.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

namespace iotbench::sut {

namespace fs = std::filesystem;

namespace {

constexpr const char* kMarkerFile = ".iotbench-store";
constexpr std::uint32_t kIndexMagic = 0x49544f49;  // "IOTI"

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidParameter("sut." + key, "expected true/false, got '" + v + "'");
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    long long out = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw InvalidParameter("sut." + key, "expected an integer, got '" + v + "'");
  }
}

// Streaming aggregate state over one sensor's points in timestamp order.
class Accumulator {
 public:
  void add(const DataPoint& p) {
    if (count_ == 0) {
      first_ = max_ = min_ = p.value;
      is_string_ = std::holds_alternative<std::string>(p.value);
    } else {
      if (compare_values(p.value, max_) > 0) max_ = p.value;
      if (compare_values(p.value, min_) < 0) min_ = p.value;
    }
    last_ = p.value;
    if (!is_string_) {
      if (auto* i = std::get_if<std::int64_t>(&p.value))
        sum_ += static_cast<double>(*i);
      else
        sum_ += std::get<double>(p.value);
    }
    ++count_;
  }

  bool empty() const { return count_ == 0; }

  std::optional<Value> result(AggFunction f) const {
    switch (f) {
      case AggFunction::avg:
        if (is_string_) return std::nullopt;
        return sum_ / static_cast<double>(count_);
      case AggFunction::max: return max_;
      case AggFunction::min: return min_;
      case AggFunction::first: return first_;
      case AggFunction::last: return last_;
    }
    return std::nullopt;
  }

 private:
  std::size_t count_ = 0;
  double sum_ = 0;
  bool is_string_ = false;
  Value first_, last_, min_, max_;
};

void write_u32(std::ofstream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void write_u64(std::ofstream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

}  // namespace

ReferenceStoreOptions ReferenceStoreOptions::from(const SutOptions& options) {
  ReferenceStoreOptions out;
  out.root = "iotbench-data";
  for (const auto& [key, value] : options) {
    if (key == "adapter") continue;
    if (key == "data_dir") {
      out.root = value;
    } else if (key == "nodes") {
      auto n = parse_int(key, value);
      if (n < 1 || n > 1024) throw InvalidParameter("sut.nodes", "must be in [1, 1024]");
      out.nodes = static_cast<int>(n);
    } else if (key == "scalable") {
      out.scalable = parse_bool(key, value);
    } else if (key == "codec") {
      if (value != "auto" && value != "none") throw InvalidParameter("sut.codec", "expected auto or none");
      out.compress = value == "auto";
    } else if (key == "segment_points") {
      auto n = parse_int(key, value);
      if (n < 1 || n > (1 << 24)) throw InvalidParameter("sut.segment_points", "must be in [1, 2^24]");
      out.segment_points = static_cast<std::size_t>(n);
    } else if (key == "downsample_agg") {
      out.downsample_agg = agg_function_from_string(value);
    } else {
      throw InvalidParameter("sut." + key, "unknown option for the reference adapter");
    }
  }
  return out;
}

ReferenceStore::ReferenceStore(ReferenceStoreOptions options)
    : options_(std::move(options)), node_count_(options_.nodes) {
  if (options_.root.empty()) throw InvalidParameter("sut.data_dir", "must not be empty");
  std::error_code ec;
  if (fs::exists(options_.root, ec) && !fs::is_empty(options_.root, ec) &&
      !fs::exists(options_.root / kMarkerFile, ec))
    throw AdapterUnavailable("refusing to use non-empty directory " + options_.root.string() +
                             " that was not created by the reference store");
  reset_layout();
}

ReferenceStore::~ReferenceStore() { wait_for_migration(); }

void ReferenceStore::reset_layout() {
  std::error_code ec;
  if (fs::exists(options_.root, ec)) {
    for (const auto& entry : fs::directory_iterator(options_.root))
      if (entry.path().filename() != kMarkerFile) fs::remove_all(entry.path());
  }
  fs::create_directories(options_.root);
  std::ofstream(options_.root / kMarkerFile) << "iotbench reference store\n";
  node_count_ = options_.nodes;
  for (int i = 0; i < options_.nodes; ++i) fs::create_directories(node_dir(i));
  if (!fs::is_directory(options_.root)) throw AdapterUnavailable("cannot create " + options_.root.string());
}

fs::path ReferenceStore::node_dir(int node) const { return options_.root / ("node_" + std::to_string(node)); }

fs::path ReferenceStore::series_path(const Series& s) const { return node_dir(s.node) / (s.id + ".seg"); }

SutDescriptor ReferenceStore::descriptor() const {
  return {"reference", node_count_.load(), options_.scalable};
}

ReferenceStore::Series* ReferenceStore::find_series(const std::string& sensor) const {
  std::shared_lock lock(registry_mu_);
  auto it = series_.find(sensor);
  return it == series_.end() ? nullptr : it->second.get();
}

ReferenceStore::Series& ReferenceStore::series_for(const std::string& sensor) {
  if (auto* s = find_series(sensor)) return *s;
  if (sensor.empty() || sensor.find_first_of("/\\") != std::string::npos || sensor == "." || sensor == "..")
    throw SutError("invalid sensor id '" + sensor + "'");
  std::unique_lock lock(registry_mu_);
  auto& slot = series_[sensor];
  if (!slot) {
    slot = std::make_unique<Series>();
    slot->id = sensor;
    slot->node = static_cast<int>(fnv1a(sensor) % static_cast<std::uint64_t>(node_count_.load()));
  }
  return *slot;
}

InsertAck ReferenceStore::insert(std::span<const DataPoint> batch) {
  InsertAck ack;
  if (batch.empty()) return ack;

  std::vector<std::pair<const std::string*, std::vector<std::size_t>>> groups;
  std::unordered_map<std::string_view, std::size_t> group_of;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    auto [it, fresh] = group_of.emplace(batch[i].sensor_id, groups.size());
    if (fresh) groups.push_back({&batch[i].sensor_id, {}});
    groups[it->second].second.push_back(i);
  }

  for (const auto& [sensor, members] : groups) {
    Series& s = series_for(*sensor);
    std::lock_guard lock(s.mu);
    ValueKind kind = s.kind_known ? s.kind : kind_of(batch[members.front()].value);
    Timestamp prev = s.last_ts;
    bool have_prev = s.has_points;
    for (auto i : members) {
      const auto& p = batch[i];
      if (kind_of(p.value) != kind)
        throw SutError("sensor " + *sensor + ": value kind " + std::string(to_string(kind_of(p.value))) +
                       " does not match stored kind " + std::string(to_string(kind)));
      if (have_prev && p.timestamp <= prev)
        throw OrderingViolation("sensor " + *sensor + ": timestamp " + std::to_string(p.timestamp) +
                                " not after " + std::to_string(prev));
      prev = p.timestamp;
      have_prev = true;
    }
    s.kind = kind;
    s.kind_known = true;
    for (auto i : members) {
      s.head.push_back(batch[i]);
      ack.bytes += batch[i].encoded_size;
    }
    ack.points += static_cast<std::int64_t>(members.size());
    s.last_ts = prev;
    s.has_points = true;
    while (s.head.size() >= options_.segment_points) seal(s, options_.segment_points);
  }
  return ack;
}

void ReferenceStore::seal(Series& s, std::size_t count) {
  count = std::min(count, s.head.size());
  if (count == 0) return;
  std::span<const DataPoint> pts(s.head.data(), count);
  auto codec = options_.compress ? codec::codec_for(s.kind) : codec::CodecId::none;
  std::string record = codec::encode_segment(pts, codec);
  {
    std::ofstream out(series_path(s), std::ios::binary | std::ios::app);
    out.write(record.data(), static_cast<std::streamsize>(record.size()));
    if (!out) throw SutError("write failed for " + series_path(s).string());
  }
  s.segments.push_back({s.file_size, record.size(), pts.front().timestamp, pts.back().timestamp,
                        static_cast<std::uint32_t>(count)});
  s.file_size += record.size();
  s.head.erase(s.head.begin(), s.head.begin() + static_cast<std::ptrdiff_t>(count));
}

std::vector<DataPoint> ReferenceStore::read_range(Series& s, Timestamp lo, Timestamp hi) {
  std::vector<DataPoint> out;
  std::ifstream in;
  for (const auto& seg : s.segments) {
    if (seg.last_ts < lo || seg.first_ts > hi) continue;
    if (!in.is_open()) {
      in.open(series_path(s), std::ios::binary);
      if (!in) throw SutError("cannot read " + series_path(s).string());
    }
    std::string record(seg.length, '\0');
    in.seekg(static_cast<std::streamoff>(seg.offset));
    in.read(record.data(), static_cast<std::streamsize>(seg.length));
    if (!in) throw SutError("short read in " + series_path(s).string());
    for (auto& p : codec::decode_segment(record, s.id))
      if (p.timestamp >= lo && p.timestamp <= hi) out.push_back(std::move(p));
  }
  auto first = std::lower_bound(s.head.begin(), s.head.end(), lo,
                                [](const DataPoint& p, Timestamp t) { return p.timestamp < t; });
  for (auto it = first; it != s.head.end() && it->timestamp <= hi; ++it) out.push_back(*it);
  return out;
}

std::vector<Row> ReferenceStore::query(const QuerySpec& spec) {
  spec.validate();
  std::vector<Timestamp> matching;
  if (spec.kind == QueryTemplate::filtered) {
    if (Series* sv = find_series(spec.cond->sensor)) {
      std::lock_guard lock(sv->mu);
      for (const auto& p : read_range(*sv, spec.t_start, spec.t_end))
        if (compare(p.value, spec.cond->op, spec.cond->value)) matching.push_back(p.timestamp);
    }
  }

  std::vector<Row> rows;
  const auto functions = normalized_functions(spec);
  for (const auto& sensor : normalized_sensors(spec)) {
    Series* s = find_series(sensor);
    if (!s) continue;
    std::vector<DataPoint> pts;
    {
      std::lock_guard lock(s->mu);
      pts = read_range(*s, spec.t_start, spec.t_end);
    }
    switch (spec.kind) {
      case QueryTemplate::time_range:
        for (auto& p : pts) rows.push_back({sensor, p.timestamp, "", std::move(p.value)});
        break;
      case QueryTemplate::filtered:
        for (auto& p : pts)
          if (std::binary_search(matching.begin(), matching.end(), p.timestamp))
            rows.push_back({sensor, p.timestamp, "", std::move(p.value)});
        break;
      case QueryTemplate::aggregation: {
        Accumulator acc;
        for (const auto& p : pts) acc.add(p);
        if (acc.empty()) break;
        for (auto f : functions)
          if (auto v = acc.result(f)) rows.push_back({sensor, spec.t_start, std::string(to_string(f)), std::move(*v)});
        break;
      }
      case QueryTemplate::downsample: {
        if (pts.empty() || std::holds_alternative<std::string>(pts.front().value)) break;
        const std::string label(to_string(options_.downsample_agg));
        std::size_t i = 0;
        while (i < pts.size()) {
          Timestamp start = bucket_start(pts[i].timestamp, spec.t_start, spec.unit);
          Accumulator acc;
          for (; i < pts.size() && pts[i].timestamp < start + spec.unit; ++i) acc.add(pts[i]);
          rows.push_back({sensor, start, label, *acc.result(options_.downsample_agg)});
        }
        break;
      }
    }
  }
  return rows;
}

ScaleOutResult ReferenceStore::scale_out() {
  if (!options_.scalable) return {false, descriptor()};
  std::lock_guard topo(topology_mu_);
  if (migration_.joinable()) migration_.join();
  const int new_node = node_count_.load();
  fs::create_directories(node_dir(new_node));

  std::vector<Series*> all;
  {
    std::shared_lock lock(registry_mu_);
    for (auto& [id, s] : series_) all.push_back(s.get());
  }
  node_count_ = new_node + 1;
  std::sort(all.begin(), all.end(), [](Series* a, Series* b) {
    auto ha = fnv1a(a->id), hb = fnv1a(b->id);
    return ha != hb ? ha < hb : a->id < b->id;
  });
  const std::size_t share = (all.size() + static_cast<std::size_t>(new_node)) / static_cast<std::size_t>(new_node + 1);
  all.resize(share);
  migration_ = std::thread([this, targets = std::move(all), new_node] { migrate(targets, new_node); });
  return {true, descriptor()};
}

void ReferenceStore::migrate(std::vector<Series*> targets, int to_node) {
  for (Series* s : targets) {
    {
      std::lock_guard lock(s->mu);
      if (s->node != to_node) {
        fs::path from = series_path(*s);
        int old = s->node;
        s->node = to_node;
        std::error_code ec;
        if (fs::exists(from, ec)) {
          fs::rename(from, series_path(*s), ec);
          if (ec) s->node = old;  // keep serving from the old location
        }
      }
    }
    migrated_.fetch_add(1);
    std::this_thread::yield();
  }
}

void ReferenceStore::wait_for_migration() {
  std::lock_guard topo(topology_mu_);
  if (migration_.joinable()) migration_.join();
}

int ReferenceStore::node_of(const std::string& sensor) const {
  Series* s = find_series(sensor);
  if (!s) return -1;
  std::lock_guard lock(s->mu);
  return s->node;
}

void ReferenceStore::flush() {
  wait_for_migration();
  std::vector<Series*> all;
  {
    std::shared_lock lock(registry_mu_);
    for (auto& [id, s] : series_) all.push_back(s.get());
  }
  for (Series* s : all) {
    std::lock_guard lock(s->mu);
    seal(*s, s->head.size());
  }
  for (int node = 0; node < node_count_.load(); ++node) write_index(node);
}

void ReferenceStore::write_index(int node) {
  std::vector<Series*> members;
  {
    std::shared_lock lock(registry_mu_);
    for (auto& [id, s] : series_) members.push_back(s.get());
  }
  std::sort(members.begin(), members.end(), [](Series* a, Series* b) { return a->id < b->id; });

  fs::path tmp = node_dir(node) / "index.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    std::vector<Series*> here;
    for (Series* s : members) {
      std::lock_guard lock(s->mu);
      if (s->node == node) here.push_back(s);
    }
    write_u32(out, kIndexMagic);
    out.put(static_cast<char>(1));
    write_u32(out, static_cast<std::uint32_t>(here.size()));
    for (Series* s : here) {
      std::lock_guard lock(s->mu);
      auto len = static_cast<std::uint16_t>(s->id.size());
      out.put(static_cast<char>(len & 0xff));
      out.put(static_cast<char>(len >> 8));
      out.write(s->id.data(), len);
      out.put(static_cast<char>(s->kind));
      write_u32(out, static_cast<std::uint32_t>(s->segments.size()));
      std::uint64_t points = 0;
      for (const auto& seg : s->segments) points += seg.count;
      write_u64(out, points);
    }
    if (!out) throw SutError("cannot write index for node " + std::to_string(node));
  }
  fs::rename(tmp, node_dir(node) / "index");
}

std::int64_t ReferenceStore::disk_usage() {
  std::int64_t total = 0;
  std::error_code ec;
  for (auto it = fs::recursive_directory_iterator(options_.root, ec); !ec && it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    if (it->is_regular_file(ec) && it->path().filename() != kMarkerFile) {
      auto size = it->file_size(ec);
      if (!ec) total += static_cast<std::int64_t>(size);
    }
  }
  if (ec) throw SutError("disk usage probe failed: " + ec.message());
  return total;
}

std::optional<std::int64_t> ReferenceStore::stored_points() {
  std::shared_lock lock(registry_mu_);
  std::int64_t total = 0;
  for (auto& [id, s] : series_) {
    std::lock_guard series_lock(s->mu);
    for (const auto& seg : s->segments) total += seg.count;
    total += static_cast<std::int64_t>(s->head.size());
  }
  return total;
}

void ReferenceStore::cleanup() {
  wait_for_migration();
  std::unique_lock lock(registry_mu_);
  series_.clear();
  migrated_ = 0;
  reset_layout();
}

}  // namespace iotbench::sut
