#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "iotbench/datagen.hpp"

using namespace iotbench;
using namespace iotbench::datagen;

namespace {

struct Moments {
  double mean = 0, sd = 0;
};

Moments sample_moments(Generator& gen, std::size_t n) {
  double sum = 0, sq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double x = gen.next();
    sum += x;
    sq += x * x;
  }
  double mean = sum / static_cast<double>(n);
  return {mean, std::sqrt(sq / static_cast<double>(n) - mean * mean)};
}

double lag1_autocorrelation(const std::vector<double>& x) {
  double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) den += (x[i] - mean) * (x[i] - mean);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) num += (x[i] - mean) * (x[i + 1] - mean);
  return num / den;
}

// Gaussian AR(1) reference series built from <random>, independent of the harness streams.
std::vector<SamplePoint> ar1_series(double phi, std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<SamplePoint> out;
  double x = 0;
  for (std::size_t i = 0; i < n; ++i) {
    x = phi * x + std::sqrt(1 - phi * phi) * noise(rng);
    out.push_back({static_cast<Timestamp>(i * 10), x});
  }
  return out;
}

}  // namespace

TEST_CASE("constant distribution repeats its value") {
  auto gen = make_generator(DistributionSpec::constant(5.0), 1);
  for (int i = 0; i < 3; ++i) CHECK(gen.next() == 5.0);
}

TEST_CASE("exponential and pareto long-run means") {
  // analytic means 1/rate and shape*scale/(shape-1)
  auto exp_gen = make_generator(DistributionSpec::exponential(2.0), 7);
  CHECK(std::abs(sample_moments(exp_gen, 1'000'000).mean - 0.5) < 0.005);
  auto par_gen = make_generator(DistributionSpec::pareto(3, 1), 7);
  CHECK(std::abs(sample_moments(par_gen, 1'000'000).mean - 1.5) < 0.03);
}

TEST_CASE("parametric means within five standard errors") {
  struct Case {
    DistributionSpec spec;
    double mean, variance;
  };
  std::vector<Case> cases{
      {DistributionSpec::poisson(4.0), 4.0, 4.0},
      {DistributionSpec::poisson(10.0), 10.0, 10.0},
      {DistributionSpec::poisson(250.0), 250.0, 250.0},
      {DistributionSpec::pareto(3, 1), 1.5, 0.75},
      {DistributionSpec::pareto(4, 2), 8.0 / 3.0, 4.0 * 4.0 / (9.0 * 2.0)},
      {DistributionSpec::exponential(0.5), 2.0, 4.0},
      {DistributionSpec::uniform(-1, 3), 1.0, 16.0 / 12.0},
  };
  for (auto& c : cases) {
    CAPTURE(c.spec.to_string());
    auto gen = make_generator(c.spec, 42);
    constexpr std::size_t n = 1'000'000;
    double se = std::sqrt(c.variance / n);
    CHECK(std::abs(sample_moments(gen, n).mean - c.mean) < 5 * se);
  }
}

TEST_CASE("zipfian and histogram draws follow their weights") {
  auto zipf = make_generator(DistributionSpec::zipfian(10, 1.0), 3);
  std::vector<int> counts(11);
  for (int i = 0; i < 200000; ++i) {
    double x = zipf.next();
    REQUIRE(x >= 1);
    REQUIRE(x <= 10);
    counts[static_cast<std::size_t>(x)]++;
  }
  // P(1)/P(2) = 2 for theta = 1
  CHECK(static_cast<double>(counts[1]) / counts[2] == doctest::Approx(2.0).epsilon(0.05));

  auto hist = make_generator(DistributionSpec::parse("histogram:w0=1,w1=0,w2=3,lo=0,hi=30"), 5);
  int low = 0, high = 0;
  for (int i = 0; i < 100000; ++i) {
    double x = hist.next();
    REQUIRE(!(x >= 10 && x < 20));
    (x < 10 ? low : high)++;
  }
  CHECK(static_cast<double>(high) / low == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("equal spec and seed give identical streams") {
  for (auto text : {"poisson:lambda=40", "pareto:shape=2,scale=3", "zipfian:n=100,theta=0.5", "uniform:lo=1,hi=2"}) {
    auto a = make_generator(DistributionSpec::parse(text), 99);
    auto b = make_generator(DistributionSpec::parse(text), 99);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next() == b.next());
  }
}

TEST_CASE("invalid parameters name the field") {
  auto field_of = [](const DistributionSpec& s) {
    try {
      s.validate();
    } catch (const InvalidParameter& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  CHECK(field_of(DistributionSpec::exponential(0)) == "rate");
  CHECK(field_of(DistributionSpec::pareto(-1, 1)) == "shape");
  CHECK(field_of(DistributionSpec::pareto(3, 0)) == "scale");
  CHECK(field_of(DistributionSpec::uniform(2, 2)) == "lo");
  CHECK(field_of(DistributionSpec::zipfian(100, 1.5)) == "theta");
  CHECK(field_of(DistributionSpec::poisson(0)) == "lambda");
}

TEST_CASE("histogram with zero weight sum is rejected at parse") {
  CHECK_THROWS_AS(DistributionSpec::parse("histogram:w0=0,w1=0"), InvalidParameter);
  CHECK_THROWS_AS(DistributionSpec::parse("histogram:w0=1,w1=-1"), InvalidParameter);
  CHECK_THROWS_AS(DistributionSpec::parse("gamma:k=1"), InvalidParameter);
}

TEST_CASE("even spacing is an arithmetic progression") {
  SpacingSpec spacing{SpacingMode::even, 100, {}};
  TimestampState state(spacing, 0, 1);
  CHECK(next_timestamp(spacing, state) == 100);
  CHECK(next_timestamp(spacing, state) == 200);
  CHECK(next_timestamp(spacing, state) == 300);
}

TEST_CASE("uneven spacing mean gap and monotonicity") {
  SpacingSpec spacing{SpacingMode::uneven, 0, DistributionSpec::exponential(0.01)};
  TimestampState state(spacing, 0, 11);
  Timestamp prev = 0;
  constexpr int n = 100000;
  for (int i = 0; i < n; ++i) {
    Timestamp t = next_timestamp(spacing, state);
    REQUIRE(t > prev);
    prev = t;
  }
  CHECK(std::abs(static_cast<double>(prev) / n - 100.0) < 2.0);

  // sub-millisecond draws still advance
  SpacingSpec tiny{SpacingMode::uneven, 0, DistributionSpec::exponential(50.0)};
  TimestampState tiny_state(tiny, 0, 3);
  prev = 0;
  for (int i = 0; i < 1'000'000; ++i) {
    Timestamp t = next_timestamp(tiny, tiny_state);
    REQUIRE(t > prev);
    prev = t;
  }
}

TEST_CASE("integer values round half to even and strings respect length bounds") {
  ValueSpec ints{ValueKind::integer, DistributionSpec::constant(2.5)};
  ValueGenerator g(ints, 1);
  CHECK(std::get<std::int64_t>(g.next()) == 2);
  ValueSpec ints35{ValueKind::integer, DistributionSpec::constant(3.5)};
  ValueGenerator g35(ints35, 1);
  CHECK(std::get<std::int64_t>(g35.next()) == 4);

  ValueSpec strings{ValueKind::string, DistributionSpec::constant(0), DistributionSpec::uniform(-10, 400), 256};
  ValueGenerator sg(strings, 2);
  for (int i = 0; i < 2000; ++i) {
    auto s = std::get<std::string>(sg.next());
    REQUIRE(s.size() >= 1);
    REQUIRE(s.size() <= 256);
    REQUIRE(std::all_of(s.begin(), s.end(), [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }));
  }
}

TEST_CASE("encoded sizes sum to the serialized payload length") {
  for (auto kind : {ValueKind::integer, ValueKind::float64, ValueKind::string}) {
    ValueGenerator g(ValueSpec{kind, DistributionSpec::poisson(20)}, 17);
    std::vector<DataPoint> batch;
    for (int i = 0; i < 500; ++i) batch.push_back(DataPoint::make("s", i, g.next()));
    std::int64_t total = 0;
    for (const auto& p : batch) {
      REQUIRE(p.encoded_size >= 1);
      total += p.encoded_size;
    }
    CHECK(static_cast<std::int64_t>(serialize_payload(batch).size()) == total);
  }
}

TEST_CASE("replay wraps periodically") {
  std::vector<SamplePoint> pts{{0, 1.0}, {10, 2.0}, {30, 3.0}};
  auto sample = SampleSet::from_points(pts, 1);
  ReplayState st(sample, 0, "s", 1000);
  std::vector<double> values;
  std::vector<Timestamp> ts;
  for (int i = 0; i < 5; ++i) {
    auto p = replay_next(sample, st);
    values.push_back(std::get<double>(p.value));
    ts.push_back(p.timestamp);
  }
  CHECK(values == std::vector<double>{1, 2, 3, 1, 2});
  CHECK(ts == std::vector<Timestamp>{1000, 1010, 1030, 1040, 1050});
}

TEST_CASE("replay period property and thread binding") {
  std::vector<SamplePoint> pts;
  for (int i = 0; i < 70; ++i) pts.push_back({i * 5, static_cast<std::int64_t>(i * i % 13)});
  auto sample = SampleSet::from_points(pts, 10);
  CHECK(sample.points_per_set == 7);
  CHECK(sample.total_points() == 70);
  ReplayState st(sample, 12, "s", 0);
  CHECK(st.bound_set() == 2);
  const auto& set = sample.sets[2];
  Timestamp prev = -1;
  for (std::size_t i = 0; i < 1000; ++i) {
    auto p = replay_next(sample, st);
    REQUIRE(identical(p.value, set[i % set.size()].value));
    REQUIRE(p.timestamp > prev);
    prev = p.timestamp;
  }
  std::vector<SamplePoint> none;
  CHECK_THROWS_AS(SampleSet::from_points(none, 10), Error);
}

TEST_CASE("sample csv parsing") {
  auto rows = parse_sample_csv("sensor_id,timestamp_ms,value\r\ns1,10,42\ns1,20,1.5\n\"s,2\",30,\"a \"\"q\"\"\"\n");
  REQUIRE(rows.size() == 3);
  CHECK(std::get<std::int64_t>(rows[0].point.value) == 42);
  CHECK(std::get<double>(rows[1].point.value) == 1.5);
  CHECK(rows[2].sensor_id == "s,2");
  CHECK(std::get<std::string>(rows[2].point.value) == "a \"q\"");

  try {
    parse_sample_csv("sensor_id,timestamp_ms,value\ns1,10,1\ns1,xx,2\n");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_sample_csv("a,b,c\n"), Error);
  CHECK_THROWS_AS(parse_sample_csv("sensor_id,timestamp_ms,value\ns1,1,abc\n"), Error);
}

TEST_CASE("fit of a constant series is degenerate") {
  std::vector<SamplePoint> pts;
  for (int i = 0; i < 1000; ++i) pts.push_back({i * 100, 7.0});
  auto model = fit_model(pts);
  for (double q : model.quantile_table) REQUIRE(q == 7.0);
  CHECK(model.ar1_coeff == 0.0);
  CHECK(model.residual_sd == 0.0);
  CHECK(model.gap_mean == 100.0);
  SynthState st("s", 0, 5);
  for (int i = 0; i < 1000; ++i) REQUIRE(std::get<double>(synth_next(model, st).value) == 7.0);
}

TEST_CASE("fit of uniform sample matches its empirical median and bounds synthesis") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<SamplePoint> pts;
  std::vector<double> raw;
  for (int i = 0; i < 100000; ++i) {
    raw.push_back(u(rng));
    pts.push_back({i, raw.back()});
  }
  std::nth_element(raw.begin(), raw.begin() + raw.size() / 2, raw.end());
  double median = raw[raw.size() / 2];
  auto model = fit_model(pts);
  CHECK(std::abs(model.quantile(0.5) - median) < 0.02);
  CHECK(std::abs(model.quantile(0.5) - 0.5) < 0.02);
  CHECK(std::is_sorted(model.quantile_table.begin(), model.quantile_table.end()));

  SynthState st("s", 0, 9);
  for (int i = 0; i < 100000; ++i) {
    double v = std::get<double>(synth_next(model, st).value);
    REQUIRE(v >= model.quantile_table.front());
    REQUIRE(v <= model.quantile_table.back());
  }
}

TEST_CASE("AR(1) structure is recovered and reproduced") {
  auto pts = ar1_series(0.8, 100000, 77);
  std::vector<double> xs;
  for (auto& p : pts) xs.push_back(std::get<double>(p.value));
  double oracle = lag1_autocorrelation(xs);
  REQUIRE(std::abs(oracle - 0.8) < 0.02);

  auto model = fit_model(pts);
  CHECK(std::abs(model.ar1_coeff - 0.8) < 0.05);

  SynthState st("s", 0, 4);
  std::vector<double> synth;
  Timestamp prev = -1;
  for (int i = 0; i < 100000; ++i) {
    auto p = synth_next(model, st);
    REQUIRE(p.timestamp > prev);
    prev = p.timestamp;
    synth.push_back(std::get<double>(p.value));
  }
  CHECK(std::abs(lag1_autocorrelation(synth) - 0.8) < 0.05);

  // fitting is deterministic; synthesis is deterministic under seed
  auto again = fit_model(pts);
  CHECK(again.quantile_table == model.quantile_table);
  CHECK(again.ar1_coeff == model.ar1_coeff);
  SynthState a("s", 0, 4), b("s", 0, 4);
  for (int i = 0; i < 100; ++i) REQUIRE(identical(synth_next(model, a), synth_next(model, b)));
}

TEST_CASE("fit errors") {
  std::vector<SamplePoint> one{{0, 1.0}};
  CHECK_THROWS_AS(fit_model(one), Error);
  std::vector<SamplePoint> strings{{0, std::string("a")}, {1, std::string("b")}};
  CHECK_THROWS_AS(fit_model(strings), Error);
}
