#include "iotbench/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace iotbench::driver {

namespace {

struct Key {
  std::string name;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    throw InvalidParameter(key, "expected a number, got '" + v + "'");
  return out;
}

std::int64_t to_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw InvalidParameter(key, "expected an integer, got '" + v + "'");
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw InvalidParameter(key, "expected a nonnegative integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw InvalidParameter(key, "expected true or false, got '" + v + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

// Re-labels errors from nested parsers with the config key.
template <class F>
auto keyed(const std::string& key, F f) {
  try {
    return f();
  } catch (const InvalidParameter& e) {
    throw InvalidParameter(key, e.reason());
  }
}

datagen::DistributionSpec to_dist(const std::string& key, const std::string& v) {
  return keyed(key, [&] {
    auto d = datagen::DistributionSpec::parse(v);
    d.validate();
    return d;
  });
}

#define NUM(field) [](const RunConfig& c) { return format_number(static_cast<double>(c.field)); }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"sensors", NUM(sensors), [](RunConfig& c, const std::string& v) { c.sensors = static_cast<int>(to_int("sensors", v)); }},
      {"clients", NUM(clients), [](RunConfig& c, const std::string& v) { c.clients = static_cast<int>(to_int("clients", v)); }},
      {"driver_instances", NUM(driver_instances),
       [](RunConfig& c, const std::string& v) { c.driver_instances = static_cast<int>(to_int("driver_instances", v)); }},
      {"records", [](const RunConfig& c) { return std::to_string(c.records); },
       [](RunConfig& c, const std::string& v) { c.records = to_int("records", v); }},
      {"warmup_seconds", NUM(warmup_seconds),
       [](RunConfig& c, const std::string& v) { c.warmup_seconds = to_double("warmup_seconds", v); }},
      {"min_run_seconds", NUM(min_run_seconds),
       [](RunConfig& c, const std::string& v) { c.min_run_seconds = to_double("min_run_seconds", v); }},
      {"min_per_sensor_rate", NUM(min_per_sensor_rate),
       [](RunConfig& c, const std::string& v) { c.min_per_sensor_rate = to_double("min_per_sensor_rate", v); }},
      {"seed", [](const RunConfig& c) { return std::to_string(c.seed); },
       [](RunConfig& c, const std::string& v) { c.seed = to_uint("seed", v); }},
      {"desk_scale", [](const RunConfig& c) { return std::string(c.desk_scale ? "true" : "false"); },
       [](RunConfig& c, const std::string& v) { c.desk_scale = to_bool("desk_scale", v); }},
      {"batch_size", NUM(batch_size),
       [](RunConfig& c, const std::string& v) {
         auto n = to_int("batch_size", v);
         if (n < 1) throw InvalidParameter("batch_size", "must be at least 1");
         c.batch_size = static_cast<std::size_t>(n);
       }},
      {"pacing", [](const RunConfig& c) { return std::string(to_string(c.pacing)); },
       [](RunConfig& c, const std::string& v) { c.pacing = pacing_from_string(v); }},
      {"verify_sample", NUM(verify_sample),
       [](RunConfig& c, const std::string& v) {
         auto n = to_int("verify_sample", v);
         if (n < 0) throw InvalidParameter("verify_sample", "must not be negative");
         c.verify_sample = static_cast<std::size_t>(n);
       }},
      {"progress_interval", NUM(progress_interval),
       [](RunConfig& c, const std::string& v) { c.progress_interval = to_double("progress_interval", v); }},
      {"scheduler_tick", NUM(scheduler_tick),
       [](RunConfig& c, const std::string& v) { c.scheduler_tick = to_double("scheduler_tick", v); }},

      {"data.method", [](const RunConfig& c) { return std::string(workload::to_string(c.data.method)); },
       [](RunConfig& c, const std::string& v) {
         c.data.method = keyed("data.method", [&] { return workload::data_method_from_string(v); });
       }},
      {"data.kinds",
       [](const RunConfig& c) {
         std::string out;
         for (auto k : c.data.kinds) out += (out.empty() ? "" : ",") + std::string(to_string(k));
         return out;
       },
       [](RunConfig& c, const std::string& v) {
         c.data.kinds.clear();
         for (const auto& item : split(v, ','))
           c.data.kinds.push_back(keyed("data.kinds", [&] { return value_kind_from_string(item); }));
         if (c.data.kinds.empty()) throw InvalidParameter("data.kinds", "at least one value kind");
       }},
      {"data.float_dist", [](const RunConfig& c) { return c.data.float_dist.to_string(); },
       [](RunConfig& c, const std::string& v) { c.data.float_dist = to_dist("data.float_dist", v); }},
      {"data.int_dist", [](const RunConfig& c) { return c.data.int_dist.to_string(); },
       [](RunConfig& c, const std::string& v) { c.data.int_dist = to_dist("data.int_dist", v); }},
      {"data.string_length", [](const RunConfig& c) { return c.data.string_length.to_string(); },
       [](RunConfig& c, const std::string& v) { c.data.string_length = to_dist("data.string_length", v); }},
      {"data.max_string_len", NUM(data.max_string_len),
       [](RunConfig& c, const std::string& v) {
         auto n = to_int("data.max_string_len", v);
         if (n < 1) throw InvalidParameter("data.max_string_len", "must be at least 1");
         c.data.max_string_len = static_cast<std::size_t>(n);
       }},
      {"data.spacing",
       [](const RunConfig& c) { return std::string(c.data.spacing.mode == datagen::SpacingMode::even ? "even" : "uneven"); },
       [](RunConfig& c, const std::string& v) {
         if (v == "even")
           c.data.spacing.mode = datagen::SpacingMode::even;
         else if (v == "uneven")
           c.data.spacing.mode = datagen::SpacingMode::uneven;
         else
           throw InvalidParameter("data.spacing", "expected even or uneven");
       }},
      {"data.interval_ms", NUM(data.spacing.interval_ms),
       [](RunConfig& c, const std::string& v) {
         c.data.spacing.interval_ms = to_int("data.interval_ms", v);
         keyed("data.interval_ms", [&] { c.data.spacing.validate(); return 0; });
       }},
      {"data.inter_arrival", [](const RunConfig& c) { return c.data.spacing.inter_arrival.to_string(); },
       [](RunConfig& c, const std::string& v) { c.data.spacing.inter_arrival = to_dist("data.inter_arrival", v); }},
      {"data.start_ts", [](const RunConfig& c) { return std::to_string(c.data.start_ts); },
       [](RunConfig& c, const std::string& v) { c.data.start_ts = to_int("data.start_ts", v); }},
      {"data.sample_file", [](const RunConfig& c) { return c.sample_file; },
       [](RunConfig& c, const std::string& v) { c.sample_file = v; }},

      {"query.fraction", NUM(mix.query_fraction),
       [](RunConfig& c, const std::string& v) { c.mix.query_fraction = to_double("query.fraction", v); }},
      {"query.weights",
       [](const RunConfig& c) {
         std::string out;
         for (double w : c.mix.template_weights) out += (out.empty() ? "" : ",") + format_number(w);
         return out;
       },
       [](RunConfig& c, const std::string& v) {
         auto items = split(v, ',');
         if (items.size() != kQueryTemplateCount)
           throw InvalidParameter("query.weights", "expected 4 weights: time_range,aggregation,downsample,filtered");
         for (std::size_t i = 0; i < items.size(); ++i) c.mix.template_weights[i] = to_double("query.weights", items[i]);
       }},
      {"query.min_sensors", NUM(mix.min_sensors),
       [](RunConfig& c, const std::string& v) {
         c.mix.min_sensors = static_cast<std::size_t>(std::max<std::int64_t>(0, to_int("query.min_sensors", v)));
       }},
      {"query.max_sensors", NUM(mix.max_sensors),
       [](RunConfig& c, const std::string& v) {
         c.mix.max_sensors = static_cast<std::size_t>(std::max<std::int64_t>(0, to_int("query.max_sensors", v)));
       }},

      {"sut.adapter", [](const RunConfig& c) { return c.sut_adapter; },
       [](RunConfig& c, const std::string& v) { c.sut_adapter = v; }},

      {"cost.c0", NUM(cost.c0), [](RunConfig& c, const std::string& v) { c.cost.c0 = to_double("cost.c0", v); }},
      {"cost.cs", NUM(cost.cs), [](RunConfig& c, const std::string& v) { c.cost.cs = to_double("cost.cs", v); }},
      {"cost.storage_component_cost", NUM(cost.storage_component_cost),
       [](RunConfig& c, const std::string& v) {
         c.cost.storage_component_cost = to_double("cost.storage_component_cost", v);
       }},
      {"cost.storage_capacity_bytes", NUM(cost.storage_capacity_bytes),
       [](RunConfig& c, const std::string& v) {
         c.cost.storage_capacity_bytes = to_double("cost.storage_capacity_bytes", v);
       }},
      {"cost.interval_weight", NUM(cost.interval_weight),
       [](RunConfig& c, const std::string& v) { c.cost.interval_weight = to_double("cost.interval_weight", v); }},
      {"cost.interval_seconds", NUM(cost.interval_seconds),
       [](RunConfig& c, const std::string& v) { c.cost.interval_seconds = to_double("cost.interval_seconds", v); }},
      {"cost.per_record_storage_cost", NUM(cost.per_record_storage_cost),
       [](RunConfig& c, const std::string& v) {
         c.cost.per_record_storage_cost = to_double("cost.per_record_storage_cost", v);
       }},
      {"cost.record_bytes", NUM(cost.record_bytes),
       [](RunConfig& c, const std::string& v) { c.cost.record_bytes = to_double("cost.record_bytes", v); }},
  };
  return table;
}

#undef NUM

const Key* find_key(const std::string& name) {
  for (const auto& k : keys())
    if (k.name == name) return &k;
  return nullptr;
}

void apply(RunConfig& config, const std::string& key, const std::string& value, std::set<std::string>& seen) {
  if (const Key* k = find_key(key)) {
    k->set(config, value);
  } else if (key.rfind("sut.", 0) == 0 && key.size() > 4) {
    config.sut_options[key.substr(4)] = value;
  } else {
    throw InvalidParameter(key, "unknown config key");
  }
  seen.insert(key);
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : keys()) out.push_back(k.name);
  return out;
}

RunConfig parse_config(std::string_view text, const Properties& overrides) {
  RunConfig config;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto body = trim(line);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string::npos || eq == 0)
      throw InvalidParameter("line " + std::to_string(number), "expected key=value, got '" + body + "'");
    auto key = trim(std::string_view(body).substr(0, eq));
    auto value = trim(std::string_view(body).substr(eq + 1));
    try {
      apply(config, key, value, seen);
    } catch (const InvalidParameter& e) {
      throw InvalidParameter(e.field(), "line " + std::to_string(number) + ": " + e.reason());
    }
  }
  for (const auto& [key, value] : overrides) apply(config, key, value, seen);

  if (!seen.count("records")) throw InvalidParameter("records", "missing required key (total records N_p)");
  if (!seen.count("warmup_seconds")) config.warmup_seconds = config.min_run_seconds;
  config.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path, const Properties& overrides) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("config", "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides);
}

Properties config_echo(const RunConfig& config) {
  Properties out;
  for (const auto& k : keys()) out.emplace_back(k.name, k.get(config));
  for (const auto& [key, value] : config.sut_options) out.emplace_back("sut." + key, value);
  return out;
}

std::string render_config(const Properties& properties) {
  std::string out;
  for (const auto& [key, value] : properties) out += key + "=" + value + "\n";
  return out;
}

}  // namespace iotbench::driver
