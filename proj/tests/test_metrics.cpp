#include <doctest.h>

#include <cmath>
#include <random>

#include "iotbench/metrics.hpp"
#include "iotbench/types.hpp"

using namespace iotbench;

TEST_CASE("iotps uses the longer run") {
  CHECK(iotps(1000, 10, 10) == 100);
  CHECK(iotps(1200, 10, 12) == 100);
  // 7.5e9 points over 1821.794 s
  CHECK(iotps(7.5e9, 1821.794, 1821.794) == doctest::Approx(4116821).epsilon(1e-4));
  CHECK_THROWS_AS(iotps(10, 0, 1), InvalidParameter);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    double n = static_cast<double>(rng() % 1000000);
    double t = 1 + static_cast<double>(rng() % 5000);
    CHECK(iotps(n, t, t) * t == doctest::Approx(n).epsilon(1e-15));
  }
}

TEST_CASE("model iotps closed forms") {
  ScalabilityInputs in{4100, 2, 1.0, LawMode::linear, 1, 1};
  // R (2m+1) / (2m)
  CHECK(model_iotps(in) == doctest::Approx(4100.0 * 5 / 4).epsilon(1e-12));
  in.m = 4;
  CHECK(model_iotps(in) == doctest::Approx(4100.0 * 9 / 8).epsilon(1e-12));
  in.w_s = 0.9;
  in.mode = LawMode::decaying;
  double expected = 4100 * (1 + 1.25 * 0.9 * 0.9 * 0.9 * 0.9) / 2;
  CHECK(model_iotps(in) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(model_iotps(in) < 4100);
  in.mode = LawMode::linear;
  CHECK(model_iotps(in) == doctest::Approx(4100 * (1 + 1.25 * 0.9) / 2).epsilon(1e-12));

  CHECK_THROWS_AS(model_iotps({4100, 0, 1.0, LawMode::linear, 1, 1}), InvalidParameter);
  CHECK_THROWS_AS(model_iotps({4100, 2, 0.0, LawMode::linear, 1, 1}), InvalidParameter);
  CHECK_THROWS_AS(model_iotps({4100, 2, 1.0, LawMode::linear, 0, 1}), InvalidParameter);
}

TEST_CASE("model iotps properties") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> t(0.01, 100);
  for (int i = 0; i < 2000; ++i) {
    ScalabilityInputs in{1 + t(rng) * 100, 1 + static_cast<int>(rng() % 64), 1.0, LawMode::linear, t(rng), t(rng)};
    CHECK(model_iotps(in) >= in.rate);
  }
  double previous = INFINITY;
  for (int m = 1; m <= 100; ++m) {
    double v = model_iotps({4100, m, 1.0, LawMode::linear, 1, 1});
    CHECK(v < previous);
    CHECK(v > 4100);
    previous = v;
  }
}

TEST_CASE("storage cost and price performance") {
  CostModel cost;
  // 31,536,000 s/year * 4.1e6 points/s * 2.039e-8 $/record
  const double yearly = 2.0 * 24 * 365 * 1800 * 4.1e6 * 2.039e-8;
  CHECK(storage_cost(cost, 4.1e6, 1) == doctest::Approx(yearly).epsilon(1e-12));
  CHECK(storage_cost(cost, 4.1e6, 1) == doctest::Approx(2.636e6).epsilon(1e-3));
  CHECK(storage_cost(cost, 4.1e6, 10) == doctest::Approx(2.636e5).epsilon(1e-3));
  CHECK(storage_cost(cost, 0, 10) == 0);
  CHECK(storage_crossover_ratio(cost, 4.1e6) == doctest::Approx(yearly / 300000).epsilon(1e-12));

  CHECK(price_performance(cost, 4.1e6, 1) == doctest::Approx((300000 + yearly) / 4100).epsilon(1e-12));
  CHECK(price_performance(cost, 4.1e6, 10) == doctest::Approx(137.5).epsilon(5e-3));
  CHECK(price_performance(cost, 4.1e6, 100) == doctest::Approx(79.6).epsilon(5e-3));

  double previous = INFINITY;
  for (double r = 0.5; r < 1000; r *= 1.3) {
    double v = price_performance(cost, 4.1e6, r);
    CHECK(v < previous);
    previous = v;
    CHECK(storage_cost(cost, 4.1e6, r) * r == doctest::Approx(yearly).epsilon(1e-12));
  }
  CostModel doubled = cost;
  doubled.cs = 2 * cost.c0;
  CHECK(price_performance(doubled, 4.1e6, 10) > price_performance(cost, 4.1e6, 10));

  CostModel wide = cost;
  wide.record_bytes = 32;
  CHECK(storage_cost(wide, 1000, 1) == doctest::Approx(2 * storage_cost(cost, 1000, 1)));

  CostModel small = cost;
  small.storage_capacity_bytes = 1000;
  CHECK_THROWS_AS(price_performance(small, 4.1e6, 10, 2000), InvalidParameter);
  CHECK_THROWS_AS(price_performance(cost, 0, 10), InvalidParameter);
  CHECK_THROWS_AS(storage_cost(cost, 1, 0), InvalidParameter);
}

TEST_CASE("compression ratio and rate gate") {
  CHECK(compression_ratio(5, 5) == 1.0);
  CHECK(compression_ratio(1e6, 1e5) == 10.0);
  CHECK_THROWS_AS(compression_ratio(1, 0), InvalidParameter);
  CHECK((CompressionStats{1000000, 100000}.ratio()) == 10.0);

  CHECK(ingest_rate_per_sensor(4e6, 100, 1800) == doctest::Approx(22.22).epsilon(1e-3));
  CHECK(min_rate_gate(4e6, 100, 1800));
  CHECK(ingest_rate_per_sensor(1e6, 100, 1800) == doctest::Approx(5.56).epsilon(1e-3));
  CHECK_FALSE(min_rate_gate(1e6, 100, 1800));
  CHECK_THROWS_AS(min_rate_gate(1e6, 0, 1800), InvalidParameter);
}
