#include <charconv>
#include <fstream>
#include <sstream>

#include "iotbench/datagen.hpp"

namespace iotbench::datagen {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error("sample csv line " + std::to_string(line) + ": " + what);
}

// Splits one CSV record, honouring double-quoted fields with "" escapes.
// The flag records whether each field was quoted.
std::vector<std::pair<std::string, bool>> split_record(std::string_view row, std::size_t line) {
  std::vector<std::pair<std::string, bool>> fields;
  std::size_t i = 0;
  for (;;) {
    std::string field;
    bool quoted = false;
    if (i < row.size() && row[i] == '"') {
      quoted = true;
      ++i;
      for (;;) {
        if (i >= row.size()) fail(line, "unterminated quoted field");
        if (row[i] == '"') {
          if (i + 1 < row.size() && row[i + 1] == '"') {
            field.push_back('"');
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        field.push_back(row[i++]);
      }
      if (i < row.size() && row[i] != ',') fail(line, "unexpected text after quoted field");
    } else {
      while (i < row.size() && row[i] != ',') field.push_back(row[i++]);
    }
    fields.emplace_back(std::move(field), quoted);
    if (i >= row.size()) break;
    ++i;  // comma
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

std::vector<SampleRow> parse_sample_csv(std::string_view text) {
  std::vector<SampleRow> rows;
  std::size_t line = 0;
  bool header_seen = false;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view row = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line;
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    if (!header_seen) {
      if (row.substr(0, 3) == "\xEF\xBB\xBF") row.remove_prefix(3);
      if (row != "sensor_id,timestamp_ms,value") fail(line, "expected header 'sensor_id,timestamp_ms,value'");
      header_seen = true;
      continue;
    }
    if (row.empty()) continue;
    auto fields = split_record(row, line);
    if (fields.size() != 3) fail(line, "expected 3 fields, got " + std::to_string(fields.size()));
    SampleRow out;
    out.sensor_id = fields[0].first;
    if (out.sensor_id.empty()) fail(line, "empty sensor_id");
    if (!parse_number(fields[1].first, out.point.timestamp)) fail(line, "bad timestamp '" + fields[1].first + "'");
    const auto& [value, quoted] = fields[2];
    if (quoted) {
      out.point.value = value;
    } else {
      std::int64_t i = 0;
      double d = 0;
      if (parse_number(value, i))
        out.point.value = i;
      else if (parse_number(value, d))
        out.point.value = d;
      else
        fail(line, "value '" + value + "' is neither a number nor a quoted string");
    }
    rows.push_back(std::move(out));
  }
  if (!header_seen) fail(1, "empty file");
  return rows;
}

std::vector<SampleRow> load_sample_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open sample file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_sample_csv(buf.str());
}

SampleSet SampleSet::from_points(std::span<const SamplePoint> points, std::size_t set_count,
                                 std::size_t points_per_set) {
  if (points.empty()) throw Error("empty sample");
  if (set_count == 0) throw InvalidParameter("set_count", "must be at least 1");
  if (points_per_set == 0) points_per_set = points.size() / set_count;
  if (points_per_set == 0 || set_count * points_per_set > points.size())
    throw InvalidParameter("points_per_set", "sample has " + std::to_string(points.size()) + " points, need " +
                                                 std::to_string(set_count) + " sets of at least one");
  SampleSet out;
  out.set_count = set_count;
  out.points_per_set = points_per_set;
  for (std::size_t s = 0; s < set_count; ++s) {
    auto first = points.begin() + static_cast<std::ptrdiff_t>(s * points_per_set);
    out.sets.emplace_back(first, first + static_cast<std::ptrdiff_t>(points_per_set));
  }
  return out;
}

ReplayState::ReplayState(const SampleSet& sample, std::size_t thread_index, std::string sensor_id, Timestamp start)
    : sensor_id_(std::move(sensor_id)), next_ts_(start) {
  if (sample.set_count == 0 || sample.sets.empty() || sample.sets.front().empty()) throw Error("empty sample");
  set_ = thread_index % sample.set_count;
}

DataPoint replay_next(const SampleSet& sample, ReplayState& state) {
  const auto& set = sample.sets.at(state.set_);
  if (set.empty()) throw Error("empty sample");
  std::size_t pos = state.emitted_ % set.size();
  DataPoint p = DataPoint::make(state.sensor_id_, state.next_ts_, set[pos].value);
  Timestamp gap = 1;
  if (pos + 1 < set.size())
    gap = set[pos + 1].timestamp - set[pos].timestamp;
  else if (set.size() > 1)
    gap = set[1].timestamp - set[0].timestamp;
  state.next_ts_ += std::max<Timestamp>(gap, 1);
  ++state.emitted_;
  return p;
}

}  // namespace iotbench::datagen
