#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "iotbench/workload.hpp"

using namespace iotbench;
using namespace iotbench::workload;

namespace {

std::shared_ptr<const SensorSpace> make_space(std::size_t n, const DataConfig& data, std::uint64_t seed = 1) {
  return std::make_shared<const SensorSpace>(SensorSpace::build(n, data, seed));
}

ClientConfig client(std::vector<std::size_t> sensors, std::int64_t budget, std::size_t batch, double q,
                    std::uint64_t seed = 5) {
  ClientConfig c;
  c.sensors = std::move(sensors);
  c.budget = budget;
  c.batch_size = batch;
  c.mix.query_fraction = q;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("allocation follows the 2N/(2k-1) split") {
  auto a = allocate_records(1000, 3);
  CHECK(a.per_client == std::vector<std::int64_t>{400, 400, 200});
  CHECK(a.scale_out_client_index == 2);

  CHECK(allocate_records(3, 2).per_client == std::vector<std::int64_t>{2, 1});

  auto b = allocate_records(999, 3);
  CHECK(std::accumulate(b.per_client.begin(), b.per_client.end(), std::int64_t{0}) == 999);
  CHECK(b.per_client == std::vector<std::int64_t>{399, 399, 201});

  CHECK(allocate_records(300000, 3).per_client == std::vector<std::int64_t>{120000, 120000, 60000});

  CHECK_THROWS_AS(allocate_records(1000, 1), InvalidParameter);
  CHECK_THROWS_AS(allocate_records(4, 3), InvalidParameter);
}

TEST_CASE("allocation conserves records across k and N_p") {
  datagen::RandomSource rng(2024);
  for (int trial = 0; trial < 5000; ++trial) {
    int k = static_cast<int>(rng.uniform_int(2, 64));
    std::int64_t n = rng.uniform_int(2 * k - 1, 1'000'000);
    auto a = allocate_records(n, k);
    REQUIRE(a.per_client.size() == static_cast<std::size_t>(k));
    REQUIRE(std::accumulate(a.per_client.begin(), a.per_client.end(), std::int64_t{0}) == n);
    std::int64_t standard = a.per_client.front();
    REQUIRE(standard == 2 * n / (2 * k - 1));
    for (int i = 0; i + 1 < k; ++i) REQUIRE(a.per_client[static_cast<std::size_t>(i)] == standard);
    // the scale-out share stays within k-1 records of N_p/(2k-1)
    double half_share = static_cast<double>(n) / (2 * k - 1);
    REQUIRE(std::abs(static_cast<double>(a.per_client.back()) - half_share) <= k);
  }
}

TEST_CASE("q = 0 gives only writes; budget exhausts in batch steps") {
  DataConfig data;
  auto space = make_space(4, data);
  ClientWorkload w(space, data, client({0, 1, 2, 3}, 10, 4, 0.0));
  std::vector<std::size_t> sizes;
  while (auto op = w.next_op()) {
    REQUIRE(op->kind == WorkloadOp::Kind::write);
    sizes.push_back(op->batch.size());
  }
  CHECK(sizes == std::vector<std::size_t>{4, 4, 2});
  CHECK(w.remaining() == 0);
  CHECK(!w.next_op());
}

TEST_CASE("query fraction follows the binomial law") {
  DataConfig data;
  auto space = make_space(8, data);
  constexpr std::int64_t ops = 1'000'000;
  ClientWorkload w(space, data, client({0, 1}, ops, 1, 0.05));
  std::int64_t queries = 0, total = 0;
  std::array<std::int64_t, kQueryTemplateCount> per_template{};
  // the budget only counts writes; stop after 10^6 ops
  while (total < ops) {
    auto op = w.next_op();
    REQUIRE(op);
    ++total;
    if (op->kind == WorkloadOp::Kind::query) {
      ++queries;
      per_template[static_cast<std::size_t>(op->query.kind)]++;
      REQUIRE(conforms(op->query, *space));
    }
  }
  double expected = 0.05 * ops, sd = std::sqrt(ops * 0.05 * 0.95);
  CHECK(std::abs(static_cast<double>(queries) - expected) < 3 * sd);
  for (auto c : per_template) CHECK(std::abs(static_cast<double>(c) - queries / 4.0) < 4 * std::sqrt(queries * 0.25 * 0.75));
}

TEST_CASE("write limit pauses the stream at the requested point count") {
  DataConfig data;
  auto space = make_space(3, data);
  ClientWorkload w(space, data, client({0, 1, 2}, 400, 100, 0.0));
  std::int64_t written = 0;
  while (auto op = w.next_op(200)) written += static_cast<std::int64_t>(op->batch.size());
  CHECK(written == 200);
  CHECK(w.issued() == 200);
  while (auto op = w.next_op()) written += static_cast<std::int64_t>(op->batch.size());
  CHECK(written == 400);
}

TEST_CASE("writes are per-sensor time ordered and continue across budgets") {
  DataConfig data;
  data.spacing = {datagen::SpacingMode::uneven, 0, datagen::DistributionSpec::exponential(0.05)};
  data.kinds = {ValueKind::integer, ValueKind::float64, ValueKind::string};
  auto space = make_space(6, data);
  ClientWorkload w(space, data, client({0, 2, 4}, 5000, 64, 0.1));
  std::map<std::string, Timestamp> last;
  auto drain = [&] {
    while (auto op = w.next_op()) {
      if (op->kind != WorkloadOp::Kind::write) continue;
      for (const auto& p : op->batch) {
        REQUIRE(kind_of(p.value) == space->find(p.sensor_id)->kind);
        auto [it, fresh] = last.emplace(p.sensor_id, p.timestamp);
        if (!fresh) {
          REQUIRE(p.timestamp > it->second);
          it->second = p.timestamp;
        }
      }
    }
  };
  drain();
  w.reset_budget(3000);
  drain();
  CHECK(last.size() == 3);
}

TEST_CASE("identical config and seed give identical op streams") {
  DataConfig data;
  data.kinds = {ValueKind::integer, ValueKind::float64};
  auto space = make_space(10, data, 77);
  ClientWorkload a(space, data, client({1, 3, 5}, 20000, 50, 0.2, 99));
  ClientWorkload b(space, data, client({1, 3, 5}, 20000, 50, 0.2, 99));
  for (;;) {
    auto x = a.next_op();
    auto y = b.next_op();
    REQUIRE(x.has_value() == y.has_value());
    if (!x) break;
    REQUIRE(x->kind == y->kind);
    REQUIRE(x->batch.size() == y->batch.size());
    for (std::size_t i = 0; i < x->batch.size(); ++i) REQUIRE(identical(x->batch[i], y->batch[i]));
    REQUIRE(x->query.describe() == y->query.describe());
  }
}

TEST_CASE("gen_query edge cases") {
  DataConfig data;
  data.float_dist = datagen::DistributionSpec::uniform(0, 1);
  auto space = make_space(5, data);
  datagen::RandomSource rng(3);

  TimeWindow point;
  point.extend(0);
  auto q = gen_query(QueryTemplate::time_range, rng, *space, point);
  CHECK(q.t_start == 0);
  CHECK(q.t_end == 0);

  CHECK_THROWS_AS(gen_query(QueryTemplate::time_range, rng, *space, TimeWindow{}), Error);

  TimeWindow w;
  w.extend(1000);
  w.extend(1'000'000);
  for (int i = 0; i < 2000; ++i) {
    auto agg = gen_query(QueryTemplate::aggregation, rng, *space, w);
    REQUIRE(!agg.functions.empty());
    REQUIRE(agg.functions.size() <= kAggFunctionCount);
    std::set<AggFunction> uniq(agg.functions.begin(), agg.functions.end());
    REQUIRE(uniq.size() == agg.functions.size());
    REQUIRE(agg.sensors.size() >= 1);
    REQUIRE(agg.sensors.size() <= 4);

    auto f = gen_query(QueryTemplate::filtered, rng, *space, w);
    double v = std::get<double>(f.cond->value);
    REQUIRE(v >= 0.0);
    REQUIRE(v <= 1.0);
    REQUIRE(f.t_start >= w.lo);
    REQUIRE(f.t_end <= w.hi);
    REQUIRE(conforms(f, *space));

    auto d = gen_query(QueryTemplate::downsample, rng, *space, w);
    REQUIRE(d.unit > 0);
    REQUIRE(conforms(d, *space));
  }
}

TEST_CASE("string-only spaces fall back to time_range queries") {
  DataConfig data;
  data.kinds = {ValueKind::string};
  auto space = make_space(3, data);
  datagen::RandomSource rng(4);
  TimeWindow w;
  w.extend(0);
  w.extend(100000);
  CHECK(gen_query(QueryTemplate::filtered, rng, *space, w).kind == QueryTemplate::time_range);
}

TEST_CASE("sensor space lookup and determinism") {
  DataConfig data;
  data.kinds = {ValueKind::integer, ValueKind::float64, ValueKind::string};
  auto a = SensorSpace::build(100, data, 9);
  auto b = SensorSpace::build(100, data, 9);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ids.insert(a.at(i).id);
    REQUIRE(a.at(i).kind == b.at(i).kind);
  }
  CHECK(ids.size() == 100);
  CHECK(a.find("sensor_42") == &a.at(42));
  CHECK(a.find("sensor_100") == nullptr);
  CHECK(a.find("sensor_042") == nullptr);
  CHECK(a.find("bogus") == nullptr);
  CHECK_THROWS_AS(SensorSpace::build(0, data, 1), InvalidParameter);
}
