#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "iotbench/config.hpp"
#include "iotbench/driver.hpp"
#include "iotbench/modeled_sut.hpp"

using namespace iotbench;
using namespace iotbench::driver;
namespace fs = std::filesystem;

namespace {

const char* kModeledConfig = R"(# modeled SUT on a simulated clock
sensors=12
clients=3
records=300000
desk_scale=true
warmup_seconds=5
min_run_seconds=5
sut.adapter=modeled
sut.clock=simulated
sut.rate=20000
sut.nodes=2
)";

const CheckResult* find_check(const std::vector<CheckResult>& checks, const std::string& name) {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

// Acknowledges every point but keeps one fewer than it was sent.
class LossyAdapter : public sut::SutAdapter {
 public:
  explicit LossyAdapter(sut::ModeledSutOptions o) : inner_(o) {}
  sut::SutDescriptor descriptor() const override { return inner_.descriptor(); }
  sut::InsertAck insert(std::span<const DataPoint> batch) override { return inner_.insert(batch); }
  std::vector<Row> query(const QuerySpec& spec) override { return inner_.query(spec); }
  sut::ScaleOutResult scale_out() override { return inner_.scale_out(); }
  std::int64_t disk_usage() override { return inner_.disk_usage(); }
  void flush() override {}
  void cleanup() override { inner_.cleanup(); }
  bool retains_data() const override { return false; }
  SimulatedClock* simulated_clock() override { return inner_.simulated_clock(); }
  std::optional<std::int64_t> stored_points() override { return *inner_.stored_points() - 1; }

 private:
  sut::ModeledSut inner_;
};

}  // namespace

TEST_CASE("config parsing") {
  auto c = parse_config("clients=3\nrecords=1000 # N_p\n\n", {{"clients", "5"}});
  CHECK(c.clients == 5);
  CHECK(c.records == 1000);
  CHECK(c.warmup_seconds == c.min_run_seconds);

  try {
    parse_config("clients=3\n");
    FAIL("expected an error");
  } catch (const InvalidParameter& e) {
    CHECK(e.field() == "records");
  }
  try {
    parse_config("records=10\nbogus=1\n");
    FAIL("expected an error");
  } catch (const InvalidParameter& e) {
    CHECK(e.field() == "bogus");
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  try {
    parse_config("records=10\nno equals sign\n");
    FAIL("expected an error");
  } catch (const InvalidParameter& e) {
    CHECK(e.field() == "line 2");
  }
  CHECK_THROWS_AS(parse_config("records=10\nclients=1\n"), InvalidParameter);
  CHECK_THROWS_AS(parse_config("records=10\nsensors=x\n"), InvalidParameter);
  CHECK_NOTHROW(parse_config("records=1000\ndesk_scale=true\nmin_run_seconds=10\n"));

  auto full = parse_config(std::string(kModeledConfig) + "data.kinds=float64,string\nquery.weights=1,2,3,4\n");
  auto echo = config_echo(full);
  auto again = parse_config(render_config(echo));
  CHECK(config_echo(again) == echo);
  for (const auto& key : config_keys())
    CHECK(std::any_of(echo.begin(), echo.end(), [&](auto& kv) { return kv.first == key; }));
}

TEST_CASE("prerequisite checks name their failures") {
  auto c = parse_config(kModeledConfig);
  for (const auto& check : prerequisite_checks(c)) CHECK_MESSAGE(check.passed, check.name);

  auto full = c;
  full.desk_scale = false;
  full.min_run_seconds = 60;
  auto* check = find_check(prerequisite_checks(full), "min-run-duration");
  REQUIRE(check);
  CHECK_FALSE(check->passed);

  auto bad = c;
  bad.sut_adapter = "nope";
  check = find_check(prerequisite_checks(bad), "sut-adapter");
  REQUIRE(check);
  CHECK_FALSE(check->passed);

  auto single = c;
  single.clients = 1;
  auto report = run_benchmark(single);
  CHECK(report.exit_code() == 2);
  CHECK(report.iterations.empty());
  CHECK_FALSE(find_check(report.prerequisites, "config")->passed);
}

TEST_CASE("min rate gate") {
  CHECK(min_rate_gate_check(4'000'000, 100, 1800, 20).passed);
  CHECK_FALSE(min_rate_gate_check(1'000'000, 100, 1800, 20).passed);
  CHECK_FALSE(min_rate_gate_check(1'000'000, 0, 1800, 20).passed);
}

TEST_CASE("modeled SUT run follows the scalability law and is deterministic") {
  auto config = parse_config(kModeledConfig);
  std::ostringstream log;
  auto report = run_benchmark(config, {&log, std::nullopt});
  INFO(report.failure_stage);
  REQUIRE(report.exit_code() == 0);
  REQUIRE(report.metrics);
  CHECK(report.allocation == std::vector<std::int64_t>{120000, 120000, 60000});
  for (const auto& it : report.iterations) {
    const auto& m = it.measured;
    CHECK(m.n0 == 120000);
    CHECK(m.ns == 180000);
    CHECK(m.points() == 300000);
    CHECK(std::abs(m.t0 - m.ts) < 1e-6);
    CHECK(it.scaled_out);
    CHECK(it.nodes_after == 3);
    for (const auto& p : m.at_boundary)
      if (p.client_id < 2) CHECK(p.ingested == p.budget / 2);
    CHECK(find_check(it.checks, "cross-client-verification")->skipped);
  }
  CHECK(report.metrics->iotps / 20000 == doctest::Approx(1.25).epsilon(0.05));
  CHECK(report.metrics->iotps ==
        doctest::Approx(300000 / std::max(report.iterations[0].duration, report.iterations[1].duration)));

  auto rerun = run_benchmark(config);
  REQUIRE(rerun.metrics);
  CHECK(rerun.metrics->iotps == report.metrics->iotps);
  CHECK(rerun.metrics->usd_per_kiotps == report.metrics->usd_per_kiotps);
  CHECK(rerun.metrics->compression_ratio == report.metrics->compression_ratio);
  for (int i = 0; i < 2; ++i) {
    CHECK(rerun.iterations[i].measured.n0 == report.iterations[i].measured.n0);
    CHECK(rerun.iterations[i].measured.ns == report.iterations[i].measured.ns);
    CHECK(rerun.iterations[i].duration == report.iterations[i].duration);
  }
}

TEST_CASE("non-scalable adapter is flagged and the run still counts n_s") {
  auto config = parse_config(std::string(kModeledConfig) + "sut.scalable=false\n");
  auto report = run_benchmark(config);
  REQUIRE(report.exit_code() == 0);
  CHECK(report.scale_out_skipped);
  CHECK(report.iterations[0].nodes_after == 2);
  CHECK(report.iterations[0].measured.ns == 180000);
}

TEST_CASE("data inserted check reports a dropped point") {
  sut::register_adapter("lossy", [](const sut::SutOptions& o) {
    return std::make_shared<LossyAdapter>(sut::ModeledSutOptions::from(o));
  });
  auto config = parse_config(std::string(kModeledConfig) + "sut.adapter=lossy\n");
  auto report = run_benchmark(config);
  CHECK(report.exit_code() == 1);
  REQUIRE(report.iterations.size() == 1);
  auto* check = find_check(report.iterations[0].checks, "data-inserted");
  REQUIRE(check);
  CHECK_FALSE(check->passed);
  CHECK(check->detail.find("deficit=1") != std::string::npos);
  CHECK(report.failure_stage.find("data-inserted") != std::string::npos);
}

TEST_CASE("model method fits once and reuses the model") {
  auto dir = fs::temp_directory_path() / ("iotbench-model-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / "sample.csv");
    csv << "sensor_id,timestamp_ms,value\n";
    for (int i = 0; i < 500; ++i) csv << "s," << 1000 + 10 * i << "," << (i % 50) * 0.5 << "\n";
  }
  auto config = parse_config(std::string(kModeledConfig) + "data.method=model\ndata.sample_file=" +
                             (dir / "sample.csv").string() + "\n");
  auto report = run_benchmark(config);
  CHECK(report.exit_code() == 0);
  CHECK(report.model_fits == 1);
  REQUIRE(report.iterations.size() == 2);
  CHECK(report.iterations[0].model_fitted);
  CHECK_FALSE(report.iterations[1].model_fitted);
  fs::remove_all(dir);
}

TEST_CASE("desk run on the reference store passes all checks") {
  auto dir = fs::temp_directory_path() / ("iotbench-desk-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  auto config = parse_config("sensors=20\nclients=3\nrecords=30000\ndesk_scale=true\nwarmup_seconds=5\n"
                             "min_run_seconds=5\nprogress_interval=1\nsut.adapter=reference\nsut.data_dir=" + dir.string() + "\n");
  std::ostringstream log;
  auto report = run_benchmark(config, {&log, std::nullopt});
  INFO(report.failure_stage);
  for (const auto& c : report.checks()) INFO(c.name << ": " << c.detail);
  CHECK(report.exit_code() == 0);
  REQUIRE(report.iterations.size() == 2);
  for (const auto& it : report.iterations) {
    CHECK(it.duration >= 5);
    CHECK(it.measured.points() == 30000);
    CHECK(it.measured.t0 == doctest::Approx(2.5).epsilon(0.1));
    CHECK(find_check(it.checks, "cross-client-verification")->passed);
    CHECK_FALSE(find_check(it.checks, "cross-client-verification")->skipped);
  }
  CHECK(log.str().find("phase=stable points=") != std::string::npos);
  fs::remove_all(dir);
}
