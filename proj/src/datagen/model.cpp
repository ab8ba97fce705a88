#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "iotbench/datagen.hpp"

namespace iotbench::datagen {

namespace {

constexpr double kMaxAr1 = 0.999;

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

double GeneratorModel::quantile(double rank) const {
  double pos = std::clamp(rank, 0.0, 1.0) * static_cast<double>(kQuantileKnots - 1);
  auto j = static_cast<std::size_t>(std::floor(pos));
  if (j >= kQuantileKnots - 1) return quantile_table.back();
  double frac = pos - static_cast<double>(j);
  double lo = quantile_table[j], hi = quantile_table[j + 1];
  return lo == hi ? lo : lo + frac * (hi - lo);
}

GeneratorModel fit_model(std::span<const SamplePoint> sample) {
  if (sample.size() < 2) throw Error("fit_model: need at least 2 points, got " + std::to_string(sample.size()));
  const std::size_t n = sample.size();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = sample[i].value;
    if (auto* d = std::get_if<double>(&v))
      x[i] = *d;
    else if (auto* k = std::get_if<std::int64_t>(&v))
      x[i] = static_cast<double>(*k);
    else
      throw Error("fit_model: non-numeric sample value at index " + std::to_string(i));
  }

  GeneratorModel model;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });

  for (std::size_t j = 0; j < kQuantileKnots; ++j) {
    double h = static_cast<double>(n - 1) * static_cast<double>(j) / static_cast<double>(kQuantileKnots - 1);
    auto lo = static_cast<std::size_t>(std::floor(h));
    double a = x[order[lo]];
    double b = lo + 1 < n ? x[order[lo + 1]] : a;
    model.quantile_table[j] = a == b ? a : a + (h - static_cast<double>(lo)) * (b - a);
  }
  // guard against rounding making the table non-monotone
  for (std::size_t j = 1; j < kQuantileKnots; ++j)
    model.quantile_table[j] = std::max(model.quantile_table[j], model.quantile_table[j - 1]);

  // normal scores from mid-ranks
  std::vector<double> z(n);
  boost::math::normal_distribution<double> unit;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    double mid_rank = 0.5 * static_cast<double>(i + j);
    double score = boost::math::quantile(unit, (mid_rank + 0.5) / static_cast<double>(n));
    for (std::size_t t = i; t <= j; ++t) z[order[t]] = score;
    i = j + 1;
  }
  double mean = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(n);
  double denom = 0, num = 0;
  for (std::size_t t = 0; t < n; ++t) denom += (z[t] - mean) * (z[t] - mean);
  for (std::size_t t = 0; t + 1 < n; ++t) num += (z[t] - mean) * (z[t + 1] - mean);
  if (denom > 1e-12 * static_cast<double>(n)) {
    model.ar1_coeff = std::clamp(num / denom, -kMaxAr1, kMaxAr1);
    model.residual_sd = std::sqrt(1.0 - model.ar1_coeff * model.ar1_coeff);
  }

  double gap_sum = 0, gap_sq = 0;
  for (std::size_t t = 1; t < n; ++t) {
    double g = static_cast<double>(std::max<Timestamp>(sample[t].timestamp - sample[t - 1].timestamp, 1));
    gap_sum += g;
    gap_sq += g * g;
  }
  double m = static_cast<double>(n - 1);
  model.gap_mean = gap_sum / m;
  model.gap_sd = std::sqrt(std::max(0.0, gap_sq / m - model.gap_mean * model.gap_mean));
  return model;
}

SynthState::SynthState(std::string sensor_id, Timestamp start, std::uint64_t seed)
    : sensor_id_(std::move(sensor_id)), last_(start), rng_(seed) {}

DataPoint synth_next(const GeneratorModel& model, SynthState& state) {
  double z;
  if (!state.score_) {
    z = model.residual_sd > 0 ? state.rng_.normal() : 0.0;
  } else {
    z = model.ar1_coeff * *state.score_ + model.residual_sd * state.rng_.normal();
  }
  state.score_ = z;
  double value = model.quantile(standard_normal_cdf(z));

  Timestamp ts = state.last_;
  double gap = model.gap_mean + model.gap_sd * state.rng_.normal();
  state.last_ += std::max<Timestamp>(1, std::llround(gap));
  return DataPoint::make(state.sensor_id_, ts, value);
}

}  // namespace iotbench::datagen
