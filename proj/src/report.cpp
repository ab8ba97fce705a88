#include "iotbench/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace iotbench::report {

namespace {

using json = nlohmann::ordered_json;
using namespace driver;

json check_json(const CheckResult& c) {
  return {{"name", c.name}, {"passed", c.passed}, {"skipped", c.skipped}, {"detail", c.detail}};
}

CheckResult check_from(const json& j) {
  return {j.at("name").get<std::string>(), j.at("passed").get<bool>(), j.at("skipped").get<bool>(),
          j.at("detail").get<std::string>()};
}

json checks_json(const std::vector<CheckResult>& checks) {
  json out = json::array();
  for (const auto& c : checks) out.push_back(check_json(c));
  return out;
}

std::vector<CheckResult> checks_from(const json& j) {
  std::vector<CheckResult> out;
  for (const auto& c : j) out.push_back(check_from(c));
  return out;
}

json progress_json(const std::vector<ClientProgress>& p) {
  json out = json::array();
  for (const auto& c : p) out.push_back({{"client", c.client_id}, {"budget", c.budget}, {"ingested", c.ingested}});
  return out;
}

std::vector<ClientProgress> progress_from(const json& j) {
  std::vector<ClientProgress> out;
  for (const auto& c : j)
    out.push_back({c.at("client").get<int>(), c.at("budget").get<std::int64_t>(), c.at("ingested").get<std::int64_t>()});
  return out;
}

json phase_json(const PhaseStats& m) {
  json queries = json::object();
  for (const auto& [name, s] : m.queries)
    queries[name] = {{"count", s.count}, {"mean_ms", s.mean_ms}, {"p95_ms", s.p95_ms}};
  return {{"n0", m.n0},
          {"ns", m.ns},
          {"t0", m.t0},
          {"ts", m.ts},
          {"ingested_bytes", m.ingested_bytes},
          {"progress_at_scale_out", progress_json(m.at_boundary)},
          {"progress_at_end", progress_json(m.at_end)},
          {"queries", queries},
          {"instance_points", m.instance_points}};
}

PhaseStats phase_from(const json& j) {
  PhaseStats m;
  m.n0 = j.at("n0").get<std::int64_t>();
  m.ns = j.at("ns").get<std::int64_t>();
  m.t0 = j.at("t0").get<double>();
  m.ts = j.at("ts").get<double>();
  m.ingested_bytes = j.at("ingested_bytes").get<std::int64_t>();
  m.at_boundary = progress_from(j.at("progress_at_scale_out"));
  m.at_end = progress_from(j.at("progress_at_end"));
  for (const auto& [name, s] : j.at("queries").items())
    m.queries[name] = {s.at("count").get<std::int64_t>(), s.at("mean_ms").get<double>(), s.at("p95_ms").get<double>()};
  m.instance_points = j.at("instance_points").get<std::vector<std::int64_t>>();
  return m;
}

json iteration_json(const IterationResult& it) {
  return {{"index", it.index},
          {"model_fitted", it.model_fitted},
          {"warmup",
           {{"seconds", it.warmup.seconds},
            {"points", it.warmup.points},
            {"bytes", it.warmup.bytes},
            {"queries", it.warmup.queries}}},
          {"measured", phase_json(it.measured)},
          {"duration", it.duration},
          {"scaled_out", it.scaled_out},
          {"nodes_before", it.nodes_before},
          {"nodes_after", it.nodes_after},
          {"stored_bytes", it.stored_bytes},
          {"disk_bytes", it.disk_bytes},
          {"compression_ratio", it.compression_ratio},
          {"checks", checks_json(it.checks)},
          {"valid", it.valid},
          {"error", it.error}};
}

IterationResult iteration_from(const json& j) {
  IterationResult it;
  it.index = j.at("index").get<int>();
  it.model_fitted = j.at("model_fitted").get<bool>();
  const auto& w = j.at("warmup");
  it.warmup = {w.at("seconds").get<double>(), w.at("points").get<std::int64_t>(), w.at("bytes").get<std::int64_t>(),
               w.at("queries").get<std::int64_t>()};
  it.measured = phase_from(j.at("measured"));
  it.duration = j.at("duration").get<double>();
  it.scaled_out = j.at("scaled_out").get<bool>();
  it.nodes_before = j.at("nodes_before").get<int>();
  it.nodes_after = j.at("nodes_after").get<int>();
  it.stored_bytes = j.at("stored_bytes").get<std::int64_t>();
  it.disk_bytes = j.at("disk_bytes").get<std::int64_t>();
  it.compression_ratio = j.at("compression_ratio").get<double>();
  it.checks = checks_from(j.at("checks"));
  it.valid = j.at("valid").get<bool>();
  it.error = j.at("error").get<std::string>();
  return it;
}

std::string stamp(const std::string& iso) {
  std::string out;
  for (char c : iso)
    if (c != '-' && c != ':') out += c;
  return out.empty() ? "unknown" : out;
}

}  // namespace

std::string to_json(const BenchmarkReport& r) {
  json config = json::object();
  for (const auto& [k, v] : r.config) config[k] = v;
  json iterations = json::array();
  for (const auto& it : r.iterations) iterations.push_back(iteration_json(it));
  json metrics = nullptr;
  if (r.metrics)
    metrics = {{"iotps", r.metrics->iotps},
               {"compression_ratio", r.metrics->compression_ratio},
               {"storage_cost_usd", r.metrics->storage_cost},
               {"system_cost_usd", r.metrics->system_cost},
               {"usd_per_kiotps", r.metrics->usd_per_kiotps}};
  json doc = {{"schema_version", r.schema_version},
              {"harness_version", r.harness_version},
              {"started_at", r.started_at},
              {"finished_at", r.finished_at},
              {"exit_code", r.exit_code()},
              {"failure_stage", r.failure_stage},
              {"config", config},
              {"allocation", r.allocation},
              {"prerequisites", checks_json(r.prerequisites)},
              {"model_fits", r.model_fits},
              {"scale_out_skipped", r.scale_out_skipped},
              {"iterations", iterations},
              {"metrics", metrics}};
  return doc.dump(2) + "\n";
}

BenchmarkReport from_json(std::string_view text) {
  try {
    auto doc = json::parse(text);
    BenchmarkReport r;
    r.schema_version = doc.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion)
      throw InvalidParameter("schema_version", "unsupported report schema " + std::to_string(r.schema_version));
    r.harness_version = doc.at("harness_version").get<std::string>();
    r.started_at = doc.at("started_at").get<std::string>();
    r.finished_at = doc.at("finished_at").get<std::string>();
    r.failure_stage = doc.at("failure_stage").get<std::string>();
    for (const auto& [k, v] : doc.at("config").items()) r.config.emplace_back(k, v.get<std::string>());
    r.allocation = doc.at("allocation").get<std::vector<std::int64_t>>();
    r.prerequisites = checks_from(doc.at("prerequisites"));
    r.model_fits = doc.at("model_fits").get<int>();
    r.scale_out_skipped = doc.at("scale_out_skipped").get<bool>();
    for (const auto& it : doc.at("iterations")) r.iterations.push_back(iteration_from(it));
    const auto& m = doc.at("metrics");
    if (!m.is_null())
      r.metrics = Metrics{m.at("iotps").get<double>(), m.at("compression_ratio").get<double>(),
                          m.at("storage_cost_usd").get<double>(), m.at("system_cost_usd").get<double>(),
                          m.at("usd_per_kiotps").get<double>()};
    return r;
  } catch (const json::exception& e) {
    throw InvalidParameter("report", e.what());
  }
}

std::string summary(const BenchmarkReport& r) {
  std::ostringstream out;
  out << "IoTDataBench report (harness " << r.harness_version << ")\n";
  out << "started " << r.started_at << ", finished " << r.finished_at << "\n";
  out << "result: " << (r.exit_code() == 0 ? "VALID" : "INVALID");
  if (!r.failure_stage.empty()) out << " (failed at " << r.failure_stage << ")";
  out << "\n\n";
  if (!r.allocation.empty()) {
    out << "allocation:";
    for (auto a : r.allocation) out << " " << a;
    out << "\n";
  }
  for (const auto& it : r.iterations) {
    const auto& m = it.measured;
    out << "iteration " << it.index << ": T=" << std::fixed << std::setprecision(3) << it.duration << "s  n0=" << m.n0
        << " t0=" << m.t0 << "s  ns=" << m.ns << " ts=" << m.ts << "s  nodes " << it.nodes_before << "->"
        << it.nodes_after << "  S_d=" << it.disk_bytes << " r=" << it.compression_ratio << "\n"
        << std::defaultfloat;
  }
  if (r.scale_out_skipped) out << "scale-out skipped: adapter is non-scalable\n";
  if (r.metrics) {
    out << std::fixed << std::setprecision(3);
    out << "\nIoTps            " << r.metrics->iotps << "\n";
    out << "compression r    " << r.metrics->compression_ratio << "\n";
    out << "storage cost $   " << r.metrics->storage_cost << "\n";
    out << "system cost $    " << r.metrics->system_cost << "\n";
    out << "$/kIoTps         " << r.metrics->usd_per_kiotps << "\n" << std::defaultfloat;
  }
  out << "\nchecks:\n";
  for (const auto& c : r.checks())
    out << "  " << (c.skipped ? "SKIP" : c.passed ? "PASS" : "FAIL") << "  " << c.name << "  " << c.detail << "\n";
  return out.str();
}

EmittedFiles emit_report(const BenchmarkReport& r, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::string base = stamp(r.started_at);
  EmittedFiles files;
  for (int n = 0;; ++n) {
    std::string suffix = n == 0 ? base : base + "-" + std::to_string(n);
    files.report = dir / ("report-" + suffix + ".json");
    files.summary = dir / ("summary-" + suffix + ".txt");
    if (!fs::exists(files.report) && !fs::exists(files.summary)) break;
  }
  auto write = [](const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw Error("cannot write " + path.string());
  };
  write(files.report, to_json(r));
  write(files.summary, summary(r));
  return files;
}

BenchmarkReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidParameter("report", "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return from_json(text.str());
}

}  // namespace iotbench::report
