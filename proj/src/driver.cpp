#include "iotbench/driver.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "iotbench/config.hpp"

namespace iotbench::driver {

namespace {

using workload::ClientWorkload;
using workload::WorkloadOp;

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

LatencySummary summarize(std::vector<double> seconds) {
  LatencySummary s;
  s.count = static_cast<std::int64_t>(seconds.size());
  if (seconds.empty()) return s;
  double sum = 0;
  for (double v : seconds) sum += v;
  s.mean_ms = 1000 * sum / static_cast<double>(seconds.size());
  std::sort(seconds.begin(), seconds.end());
  auto idx = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(seconds.size()))) - 1;
  s.p95_ms = 1000 * seconds[std::min(idx, seconds.size() - 1)];
  return s;
}

enum class Phase { warmup, stable, scaleout, done };

// One client: its op stream, connection, counters and verification reservoir.
struct Worker {
  Worker(std::shared_ptr<const workload::SensorSpace> space, const workload::DataConfig& data,
         workload::ClientConfig config, std::shared_ptr<sut::SutAdapter> adapter, int instance, std::uint64_t seed,
         std::size_t reservoir_cap)
      : client_id(config.client_id),
        instance(instance),
        load(std::move(space), data, std::move(config)),
        session(std::move(adapter), client_id),
        rng(seed),
        cap(reservoir_cap) {}

  int client_id;
  int instance;
  ClientWorkload load;
  sut::Session session;
  datagen::RandomSource rng;
  std::size_t cap;

  // Measured-run counters; written by the worker, read by the coordinator.
  std::atomic<std::int64_t> points{0};
  std::atomic<std::int64_t> bytes{0};
  std::atomic<std::int64_t> queries{0};

  // Whole-iteration ledger for the data-inserted check.
  std::int64_t issued_points = 0;
  std::int64_t issued_bytes = 0;
  std::int64_t acked_points = 0;
  std::int64_t acked_bytes = 0;

  std::array<std::vector<double>, kQueryTemplateCount> latencies;
  std::vector<DataPoint> reservoir;
  std::int64_t seen = 0;

  void remember(const DataPoint& p) {
    ++seen;
    if (reservoir.size() < cap) {
      reservoir.push_back(p);
    } else if (cap > 0) {
      auto j = rng.uniform_int(0, seen - 1);
      if (j < static_cast<std::int64_t>(cap)) reservoir[static_cast<std::size_t>(j)] = p;
    }
  }

  void reset_counters() {
    points = 0;
    bytes = 0;
    queries = 0;
    for (auto& l : latencies) l.clear();
  }
};

// Shared state between the coordinator and its workers.
class Coordinator {
 public:
  Coordinator(const RunConfig& config, std::shared_ptr<sut::SutAdapter> adapter, std::ostream* log)
      : config_(config), adapter_(std::move(adapter)), sim_(adapter_->simulated_clock()), log_(log) {}

  double now() const { return sim_ ? sim_->now() : wall_.now(); }
  bool simulated() const { return sim_ != nullptr; }
  bool aborted() const { return abort_.load(); }

  void fail(const std::string& message) {
    std::lock_guard lock(mu_);
    if (!abort_) error_ = message;
    abort_ = true;
    cv_.notify_all();
  }
  std::string error() const {
    std::lock_guard lock(mu_);
    return error_;
  }

  void set_phase(Phase p) {
    std::lock_guard lock(mu_);
    phase_ = p;
    cv_.notify_all();
  }
  Phase phase() const {
    std::lock_guard lock(mu_);
    return phase_;
  }
  void wait_for_phase(Phase p) {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return phase_ == p || abort_; });
  }

  void reset_clock() {
    wall_.reset();
    if (sim_) sim_->reset();
  }

  // Wall-clock sleep that wakes up on abort.
  void sleep_until(double t) {
    while (!aborted()) {
      double left = t - wall_.now();
      if (left <= 0) return;
      std::this_thread::sleep_for(std::chrono::duration<double>(std::min(left, 0.05)));
    }
  }

  struct Segment {
    std::int64_t write_limit = std::numeric_limits<std::int64_t>::max();
    std::optional<double> deadline;
    double pace_start = 0;
    double pace_rate = 0;  // points/sec, 0 = open
    std::int64_t pace_offset = 0;
    bool measured = true;
  };

  // Runs one client until its limit, deadline or an abort.
  void drive(Worker& w, const Segment& seg) {
    try {
      while (!aborted()) {
        if (seg.deadline && now() >= *seg.deadline) return;
        auto op = w.load.next_op(seg.write_limit);
        if (!op) return;
        if (op->kind == WorkloadOp::Kind::write) {
          const auto n = static_cast<std::int64_t>(op->batch.size());
          const auto b = op->batch_bytes();
          if (seg.pace_rate > 0)
            sleep_until(seg.pace_start + static_cast<double>(w.load.issued() - seg.pace_offset) / seg.pace_rate);
          if (aborted()) return;
          w.issued_points += n;
          w.issued_bytes += b;
          auto ack = w.session.insert(op->batch);
          w.acked_points += ack.points;
          w.acked_bytes += ack.bytes;
          for (const auto& p : op->batch) w.remember(p);
          if (seg.measured) {
            w.points += n;
            w.bytes += b;
          }
        } else {
          auto start = std::chrono::steady_clock::now();
          w.session.query(op->query);
          double took = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          if (seg.measured) w.latencies[static_cast<std::size_t>(op->query.kind)].push_back(took);
          w.queries += 1;
        }
      }
    } catch (const std::exception& e) {
      fail("client " + std::to_string(w.client_id) + ": " + e.what());
    }
  }

  void log_progress(const char* phase, std::int64_t points, std::int64_t bytes, double qps) {
    if (!log_) return;
    std::lock_guard lock(log_mu_);
    *log_ << "phase=" << phase << " points=" << points << " bytes=" << bytes << " qps=" << std::fixed
          << std::setprecision(1) << qps << std::defaultfloat << std::endl;
  }

  const RunConfig& config() const { return config_; }
  sut::SutAdapter& adapter() { return *adapter_; }
  SimulatedClock* sim() { return sim_; }
  WallClock& wall() { return wall_; }

 private:
  const RunConfig& config_;
  std::shared_ptr<sut::SutAdapter> adapter_;
  SimulatedClock* sim_;
  WallClock wall_;
  std::ostream* log_;
  std::mutex log_mu_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  Phase phase_ = Phase::warmup;
  std::atomic<bool> abort_{false};
  std::string error_;
};

std::vector<ClientProgress> progress(const std::vector<std::unique_ptr<Worker>>& workers,
                                     const workload::Allocation& alloc) {
  std::vector<ClientProgress> out;
  for (std::size_t c = 0; c < workers.size(); ++c)
    out.push_back({workers[c]->client_id, alloc.per_client[c], workers[c]->points.load()});
  return out;
}

struct Totals {
  std::int64_t points = 0, bytes = 0, queries = 0;
};

Totals totals(const std::vector<std::unique_ptr<Worker>>& workers) {
  Totals t;
  for (const auto& w : workers) {
    t.points += w->points.load();
    t.bytes += w->bytes.load();
    t.queries += w->queries.load();
  }
  return t;
}

class Iteration {
 public:
  Iteration(const RunConfig& config, std::shared_ptr<sut::SutAdapter> adapter, const workload::DataConfig& data,
            const workload::Allocation& alloc, std::ostream* log)
      : config_(config), adapter_(adapter), alloc_(alloc), coord_(config, adapter, log) {
    auto space = std::make_shared<const workload::SensorSpace>(
        workload::SensorSpace::build(static_cast<std::size_t>(config.sensors), data, config.seed));
    const int k = config.clients;
    for (int c = 0; c < k; ++c) {
      workload::ClientConfig cc;
      cc.client_id = c;
      cc.thread_id = c;
      for (int s = c; s < config.sensors; s += k) cc.sensors.push_back(static_cast<std::size_t>(s));
      cc.budget = alloc.per_client[static_cast<std::size_t>(c)];
      cc.batch_size = config.batch_size;
      cc.mix = config.mix;
      cc.seed = datagen::derive_seed(config.seed, static_cast<std::uint64_t>(c));
      workers_.push_back(std::make_unique<Worker>(space, data, std::move(cc), adapter, c % config.driver_instances,
                                                  datagen::derive_seed(config.seed, 0x10000u + static_cast<unsigned>(c)),
                                                  config.verify_sample));
    }
    paced_ = config.pacing == Pacing::paced || (config.pacing == Pacing::automatic && !coord_.simulated());
  }

  void run(IterationResult& out) {
    out.nodes_before = adapter_->descriptor().node_count;
    warmup(out);
    if (coord_.aborted()) return abort(out, "warmup");
    measured(out);
    if (coord_.aborted()) return abort(out, "measured run");
    data_check(out);
  }

 private:
  int k() const { return config_.clients; }
  Worker& scale_out_client() { return *workers_.back(); }

  // Planned measured-run length for paced clients.
  double planned_length(double w) const { return std::max(w, config_.min_run_seconds); }

  void abort(IterationResult& out, const std::string& stage) {
    out.valid = false;
    out.error = stage + ": " + coord_.error();
    out.checks.push_back({stage, false, false, coord_.error()});
  }

  // Starts one thread per client of `members`, grouped by driver instance.
  template <class F>
  std::vector<std::thread> launch(const std::vector<Worker*>& members, F body) {
    std::vector<std::thread> threads;
    for (int inst = 0; inst < config_.driver_instances; ++inst)
      for (Worker* w : members)
        if (w->instance == inst) threads.emplace_back(body, w);
    return threads;
  }

  std::vector<Worker*> standard() {
    std::vector<Worker*> out;
    for (int c = 0; c + 1 < k(); ++c) out.push_back(workers_[static_cast<std::size_t>(c)].get());
    return out;
  }

  void warmup(IterationResult& out) {
    coord_.reset_clock();
    coord_.set_phase(Phase::warmup);
    const double w = config_.warmup_seconds;
    const double length = planned_length(w);
    if (auto* sim = coord_.sim()) sim->watch(w);
    for (Worker* wk : standard()) wk->load.reset_budget(std::numeric_limits<std::int64_t>::max());

    auto threads = launch(standard(), [&](Worker* wk) {
      Coordinator::Segment seg;
      seg.deadline = w;
      seg.measured = false;
      if (paced_) seg.pace_rate = static_cast<double>(alloc_.per_client[static_cast<std::size_t>(wk->client_id)]) / length;
      coord_.drive(*wk, seg);
    });
    for (auto& t : threads) t.join();

    double recorded = coord_.now();
    if (auto* sim = coord_.sim()) {
      if (auto crossed = sim->crossing()) recorded = *crossed;
      sim->advance_to(w);
      recorded = std::max(recorded, w);
    }
    out.warmup.seconds = recorded;
    for (Worker* wk : standard()) {
      out.warmup.points += wk->issued_points;
      out.warmup.bytes += wk->issued_bytes;
      out.warmup.queries += wk->queries.load();
    }
  }

  void measured(IterationResult& out) {
    const double w = out.warmup.seconds;
    const double length = planned_length(w);
    for (auto& wk : workers_) {
      wk->reset_counters();
      wk->load.reset_budget(alloc_.per_client[static_cast<std::size_t>(wk->client_id)]);
    }
    coord_.reset_clock();
    coord_.set_phase(Phase::stable);

    std::vector<std::int64_t> half(workers_.size());
    for (std::size_t c = 0; c < workers_.size(); ++c) half[c] = alloc_.per_client[c] / 2;

    auto rate_of = [&](const Worker& wk, double seconds) {
      return paced_ ? static_cast<double>(alloc_.per_client[static_cast<std::size_t>(wk.client_id)]) / seconds : 0.0;
    };

    std::atomic<int> paused{0};
    auto threads = launch(standard(), [&](Worker* wk) {
      Coordinator::Segment seg;
      seg.pace_rate = rate_of(*wk, length);
      seg.write_limit = half[static_cast<std::size_t>(wk->client_id)];
      coord_.drive(*wk, seg);
      paused += 1;
      coord_.wait_for_phase(Phase::scaleout);
      seg.write_limit = std::numeric_limits<std::int64_t>::max();
      coord_.drive(*wk, seg);
    });

    // Stable phase: at least W/2, and until every standard client finished half its budget.
    const int standard_count = k() - 1;
    double last_log = coord_.wall().now();
    Totals last_totals;
    auto tick = [&](const char* phase) {
      std::this_thread::sleep_for(std::chrono::duration<double>(coord_.simulated() ? 0.001 : config_.scheduler_tick));
      double t = coord_.wall().now();
      if (t - last_log >= config_.progress_interval) {
        auto now_totals = totals(workers_);
        coord_.log_progress(phase, now_totals.points, now_totals.bytes,
                            static_cast<double>(now_totals.queries - last_totals.queries) / (t - last_log));
        last_totals = now_totals;
        last_log = t;
      }
    };
    if (coord_.simulated()) {
      while (!coord_.aborted() && paused.load() < standard_count) tick("stable");
      coord_.sim()->advance_to(w / 2);
    } else {
      while (!coord_.aborted() && (coord_.now() < w / 2 || paused.load() < standard_count)) tick("stable");
    }
    if (coord_.aborted()) {
      coord_.set_phase(Phase::done);
      for (auto& t : threads) t.join();
      return;
    }

    const double boundary = coord_.now();
    out.measured.at_boundary = progress(workers_, alloc_);
    out.measured.n0 = totals(workers_).points;

    sut::ScaleOutResult scaled;
    try {
      scaled = adapter_->scale_out();
    } catch (const std::exception& e) {
      coord_.fail(std::string("scale-out: ") + e.what());
    }
    out.scaled_out = scaled.scaled;
    out.nodes_after = scaled.scaled ? scaled.descriptor.node_count : out.nodes_before;
    coord_.set_phase(Phase::scaleout);

    Worker& extra = scale_out_client();
    std::thread extra_thread([&] {
      Coordinator::Segment seg;
      seg.pace_start = boundary;
      seg.pace_rate = rate_of(extra, std::max(length - boundary, config_.scheduler_tick));
      coord_.drive(extra, seg);
    });

    auto all_done = [&] {
      for (std::size_t c = 0; c < workers_.size(); ++c)
        if (workers_[c]->points.load() < alloc_.per_client[c]) return false;
      return true;
    };
    while (!coord_.aborted() && !all_done()) tick("scaleout");
    for (auto& t : threads) t.join();
    extra_thread.join();
    coord_.set_phase(Phase::done);

    const double end = coord_.now();
    auto t = totals(workers_);
    out.measured.t0 = boundary;
    out.measured.ts = end - boundary;
    out.measured.ns = t.points - out.measured.n0;
    out.measured.ingested_bytes = t.bytes;
    out.measured.at_end = progress(workers_, alloc_);
    out.duration = out.measured.duration();

    out.measured.instance_points.assign(static_cast<std::size_t>(config_.driver_instances), 0);
    std::array<std::vector<double>, kQueryTemplateCount> merged;
    for (auto& wk : workers_) {
      out.measured.instance_points[static_cast<std::size_t>(wk->instance)] += wk->points.load();
      for (std::size_t q = 0; q < kQueryTemplateCount; ++q)
        merged[q].insert(merged[q].end(), wk->latencies[q].begin(), wk->latencies[q].end());
    }
    for (std::size_t q = 0; q < kQueryTemplateCount; ++q)
      out.measured.queries[std::string(to_string(static_cast<QueryTemplate>(q)))] = summarize(std::move(merged[q]));
  }

  void data_check(IterationResult& out) {
    auto& checks = out.checks;
    const auto& m = out.measured;
    checks.push_back({"counting-identity", m.points() == alloc_.total, false,
                      "n0+ns=" + std::to_string(m.points()) + " N_p=" + std::to_string(alloc_.total)});
    checks.push_back({"min-run-duration", out.duration >= config_.min_run_seconds, false,
                      "T=" + std::to_string(out.duration) + "s min=" + std::to_string(config_.min_run_seconds) + "s"});
    checks.push_back(min_rate_gate_check(m.points(), config_.sensors, out.duration, config_.min_per_sensor_rate));
    if (!out.scaled_out) checks.push_back({"scale-out", true, true, "adapter is non-scalable; topology unchanged"});

    // Data inserted check: every issued point acknowledged and held by the SUT.
    std::int64_t issued_points = 0, issued_bytes = 0, acked_points = 0, acked_bytes = 0;
    for (auto& wk : workers_) {
      issued_points += wk->issued_points;
      issued_bytes += wk->issued_bytes;
      acked_points += wk->acked_points;
      acked_bytes += wk->acked_bytes;
    }
    out.stored_bytes = issued_bytes;
    try {
      adapter_->flush();
      auto stored = adapter_->stored_points();
      std::ostringstream detail;
      detail << "issued points=" << issued_points << " bytes=" << issued_bytes << "; acknowledged points="
             << acked_points << " bytes=" << acked_bytes;
      bool ok = acked_points == issued_points && acked_bytes == issued_bytes;
      std::int64_t deficit = issued_points - acked_points;
      if (stored) {
        detail << "; stored points=" << *stored;
        ok = ok && *stored == issued_points;
        deficit = std::max(deficit, issued_points - *stored);
      }
      if (!ok) detail << "; deficit=" << deficit;
      checks.push_back({"data-inserted", ok, false, detail.str()});
    } catch (const std::exception& e) {
      checks.push_back({"data-inserted", false, false, e.what()});
    }

    // Disk storage check.
    try {
      out.disk_bytes = adapter_->disk_usage();
      bool ok = out.disk_bytes > 0;
      if (ok) out.compression_ratio = compression_ratio(static_cast<double>(issued_bytes), static_cast<double>(out.disk_bytes));
      std::ostringstream detail;
      detail << "S_d=" << out.disk_bytes << " S_i=" << issued_bytes << " r=" << out.compression_ratio;
      checks.push_back({"disk-storage", ok, false, detail.str()});
    } catch (const std::exception& e) {
      checks.push_back({"disk-storage", false, false, e.what()});
    }

    checks.push_back(cross_client_check());
    checks.push_back({"replica-count", true, true, "replication is out of scope for this harness"});

    out.valid = std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
    if (!out.valid)
      for (const auto& c : checks)
        if (!c.passed) {
          out.error = "data check: " + c.name;
          break;
        }
  }

  CheckResult cross_client_check() {
    CheckResult check{"cross-client-verification", true, false, ""};
    if (!adapter_->retains_data()) {
      check.skipped = true;
      check.detail = "adapter does not retain data";
      return check;
    }
    std::vector<std::pair<int, const DataPoint*>> pool;
    for (auto& wk : workers_)
      for (const auto& p : wk->reservoir) pool.push_back({wk->client_id, &p});
    datagen::RandomSource rng(datagen::derive_seed(config_.seed, 0x20000));
    for (std::size_t i = 0; i < pool.size() && i < config_.verify_sample; ++i) {
      auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(pool.size()) - 1));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(std::min(pool.size(), config_.verify_sample));

    std::size_t checked = 0;
    try {
      for (const auto& [owner, p] : pool) {
        sut::Session reader(adapter_, (owner + 1) % k());
        QuerySpec spec;
        spec.kind = QueryTemplate::time_range;
        spec.sensors = {p->sensor_id};
        spec.t_start = spec.t_end = p->timestamp;
        auto rows = reader.query(spec);
        if (rows.size() != 1 || rows[0].timestamp != p->timestamp || !identical(rows[0].value, p->value)) {
          check.passed = false;
          check.detail = "first mismatch: sensor " + p->sensor_id + " t=" + std::to_string(p->timestamp) +
                         " written " + format_value(p->value) + ", read " +
                         (rows.empty() ? std::string("nothing") : format_value(rows[0].value));
          return check;
        }
        ++checked;
      }
    } catch (const std::exception& e) {
      check.passed = false;
      check.detail = e.what();
      return check;
    }
    check.detail = std::to_string(checked) + " points re-read bit-exact via a different client";
    return check;
  }

  const RunConfig& config_;
  std::shared_ptr<sut::SutAdapter> adapter_;
  const workload::Allocation& alloc_;
  Coordinator coord_;
  std::vector<std::unique_ptr<Worker>> workers_;
  bool paced_ = false;
};

bool config_error_stage(const BenchmarkReport& r) { return r.failure_stage == "prerequisites"; }

}  // namespace

std::string_view to_string(Pacing p) {
  switch (p) {
    case Pacing::automatic: return "auto";
    case Pacing::paced: return "paced";
    case Pacing::open: return "open";
  }
  return "auto";
}

Pacing pacing_from_string(std::string_view s) {
  if (s == "auto") return Pacing::automatic;
  if (s == "paced") return Pacing::paced;
  if (s == "open") return Pacing::open;
  throw InvalidParameter("pacing", "expected auto, paced or open, got '" + std::string(s) + "'");
}

void RunConfig::validate() const {
  if (sensors < 1) throw InvalidParameter("sensors", "m_s must be at least 1");
  if (clients < 2) throw InvalidParameter("clients", "k must be at least 2 (one client joins at scale-out)");
  if (sensors < clients) throw InvalidParameter("sensors", "need at least one sensor per client");
  if (driver_instances < 1 || driver_instances > clients)
    throw InvalidParameter("driver_instances", "n_i must be in [1, clients]");
  if (records < 2 * static_cast<std::int64_t>(clients) - 1)
    throw InvalidParameter("records", "N_p must be at least 2k-1");
  if (!(warmup_seconds > 0)) throw InvalidParameter("warmup_seconds", "must be positive");
  if (!(min_run_seconds > 0)) throw InvalidParameter("min_run_seconds", "must be positive");
  if (!(min_per_sensor_rate >= 0)) throw InvalidParameter("min_per_sensor_rate", "must not be negative");
  if (batch_size < 1) throw InvalidParameter("batch_size", "must be at least 1");
  if (!(progress_interval > 0)) throw InvalidParameter("progress_interval", "must be positive");
  if (!(scheduler_tick > 0)) throw InvalidParameter("scheduler_tick", "must be positive");
  if (data.kinds.empty()) throw InvalidParameter("data.kinds", "at least one value kind");
  if (data.method != workload::DataMethod::distribution && sample_file.empty() && !data.sample && !data.model)
    throw InvalidParameter("data.sample_file", "required for the replay and model methods");
  mix.validate();
  cost.validate();
}

std::vector<CheckResult> BenchmarkReport::checks() const {
  std::vector<CheckResult> out = prerequisites;
  for (const auto& it : iterations)
    for (const auto& c : it.checks) {
      out.push_back(c);
      out.back().name = "iteration" + std::to_string(it.index) + "." + c.name;
    }
  return out;
}

int BenchmarkReport::exit_code() const {
  if (config_error_stage(*this)) return 2;
  if (!failure_stage.empty()) return 1;
  for (const auto& c : checks())
    if (!c.passed) return 1;
  return 0;
}

CheckResult min_rate_gate_check(std::int64_t points, int sensors, double seconds, double min_rate) {
  CheckResult c{"min-ingest-rate", false, false, ""};
  try {
    double rate = ingest_rate_per_sensor(static_cast<double>(points), sensors, seconds);
    c.passed = rate >= min_rate;
    std::ostringstream detail;
    detail << "N_p/(m_s*T)=" << rate << " points/s per sensor, required " << min_rate;
    c.detail = detail.str();
  } catch (const std::exception& e) {
    c.detail = e.what();
  }
  return c;
}

std::vector<CheckResult> prerequisite_checks(const RunConfig& config, const RunOptions& options) {
  std::vector<CheckResult> out;
  try {
    config.validate();
    out.push_back({"config", true, false, "all invariants hold"});
  } catch (const InvalidParameter& e) {
    out.push_back({"config", false, false, e.what()});
  }

  if (sut::has_adapter(config.sut_adapter))
    out.push_back({"sut-adapter", true, false, config.sut_adapter});
  else {
    std::string names;
    for (const auto& n : sut::adapter_names()) names += (names.empty() ? "" : ", ") + n;
    out.push_back({"sut-adapter", false, false,
                   "unknown adapter '" + config.sut_adapter + "'; set sut.adapter to one of: " + names});
  }

  if (options.output_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(*options.output_dir, ec);
    auto probe = fs::path(*options.output_dir) / ".iotbench-write-probe";
    bool ok = !ec && static_cast<bool>(std::ofstream(probe));
    fs::remove(probe, ec);
    out.push_back({"output-dir", ok, false,
                   ok ? *options.output_dir : "cannot write to " + *options.output_dir + "; pass --out or fix permissions"});
  }

  out.push_back({"clock", std::chrono::steady_clock::is_steady, false,
                 std::chrono::steady_clock::is_steady ? "monotonic clock present" : "no monotonic clock available"});

  if (config.desk_scale) {
    bool ok = config.min_run_seconds >= kDeskScaleFloorSeconds && config.warmup_seconds >= kDeskScaleFloorSeconds;
    out.push_back({"min-run-duration", ok, false,
                   ok ? "desk scale" : "desk scale requires min_run_seconds and warmup_seconds >= 5"});
  } else {
    bool ok = config.min_run_seconds >= kFullScaleMinRunSeconds;
    out.push_back({"min-run-duration", ok, false,
                   ok ? "full scale" : "min_run_seconds must be at least 1800 unless desk_scale=true"});
  }
  return out;
}

BenchmarkReport run_benchmark(const RunConfig& config, const RunOptions& options) {
  BenchmarkReport report;
  report.started_at = utc_now();
  report.config = config_echo(config);
  report.prerequisites = prerequisite_checks(config, options);
  auto finish = [&]() -> BenchmarkReport {
    report.finished_at = utc_now();
    return report;
  };
  for (const auto& c : report.prerequisites)
    if (!c.passed) {
      report.failure_stage = "prerequisites";
      return finish();
    }

  auto alloc = workload::allocate_records(config.records, config.clients);
  report.allocation = alloc.per_client;

  std::shared_ptr<sut::SutAdapter> adapter;
  try {
    adapter = sut::make_adapter(config.sut_adapter, config.sut_options);
  } catch (const std::exception& e) {
    report.prerequisites.push_back({"sut-available", false, false, e.what()});
    report.failure_stage = "prerequisites";
    return finish();
  }

  // Model phase, first iteration only; the result is reused in the second.
  workload::DataConfig data = config.data;
  bool fitted_now = false;
  try {
    if (data.method != workload::DataMethod::distribution && !data.sample && !data.model) {
      auto rows = datagen::load_sample_csv(config.sample_file);
      std::vector<datagen::SamplePoint> points;
      for (auto& r : rows) points.push_back(r.point);
      if (data.method == workload::DataMethod::replay) {
        data.sample = std::make_shared<const datagen::SampleSet>(datagen::SampleSet::from_points(
            points, datagen::kFullScaleSetCount, config.desk_scale ? datagen::kDeskScalePointsPerSet : 0));
      } else {
        data.model = std::make_shared<const datagen::GeneratorModel>(datagen::fit_model(points));
        ++report.model_fits;
        fitted_now = true;
      }
    }
  } catch (const std::exception& e) {
    report.prerequisites.push_back({"data-source", false, false, e.what()});
    report.failure_stage = "prerequisites";
    return finish();
  }

  double longest = 0;
  std::int64_t ingested_for_ratio = 0, disk_for_ratio = 0;
  for (int i = 1; i <= 2; ++i) {
    if (i == 2) {
      try {
        adapter->cleanup();
      } catch (const std::exception& e) {
        report.failure_stage = std::string("cleanup: ") + e.what();
        return finish();
      }
    }
    IterationResult result;
    result.index = i;
    result.model_fitted = i == 1 && fitted_now;
    Iteration(config, adapter, data, alloc, options.log).run(result);
    if (!result.scaled_out) report.scale_out_skipped = true;
    report.iterations.push_back(result);
    if (!result.valid) {
      report.failure_stage = "iteration " + std::to_string(i) + ": " + result.error;
      return finish();
    }
    if (result.duration >= longest) {
      longest = result.duration;
      ingested_for_ratio = result.stored_bytes;
      disk_for_ratio = result.disk_bytes;
    }
  }

  try {
    Metrics m;
    m.iotps = iotps(static_cast<double>(alloc.total), report.iterations[0].duration, report.iterations[1].duration);
    m.compression_ratio = compression_ratio(static_cast<double>(ingested_for_ratio), static_cast<double>(disk_for_ratio));
    m.storage_cost = storage_cost(config.cost, m.iotps, m.compression_ratio);
    m.system_cost = config.cost.system_cost();
    m.usd_per_kiotps =
        price_performance(config.cost, m.iotps, m.compression_ratio, static_cast<double>(ingested_for_ratio));
    report.metrics = m;
  } catch (const std::exception& e) {
    report.failure_stage = std::string("metrics: ") + e.what();
  }
  return finish();
}

}  // namespace iotbench::driver
