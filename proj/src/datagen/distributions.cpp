#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <sstream>

#include "iotbench/datagen.hpp"

namespace iotbench::datagen {

namespace {

const std::map<std::string, double>& default_params() {
  static const std::map<std::string, double> defaults{
      {"lambda", 10.0}, {"shape", 3.0}, {"scale", 1.0}, {"rate", 1.0}, {"n", 1000.0},
      {"theta", 0.99},  {"lo", 0.0},    {"hi", 1.0},    {"value", 0.0}};
  return defaults;
}

double parse_double(std::string_view field, std::string_view text) {
  double out = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw InvalidParameter(std::string(field), "not a number: '" + std::string(text) + "'");
  return out;
}

void require_positive(const DistributionSpec& spec, const std::string& name) {
  double v = spec.param(name);
  if (!(v > 0) || !std::isfinite(v)) throw InvalidParameter(name, "must be strictly positive");
}

}  // namespace

std::string_view to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::constant: return "constant";
    case DistributionKind::uniform: return "uniform";
    case DistributionKind::zipfian: return "zipfian";
    case DistributionKind::histogram: return "histogram";
    case DistributionKind::poisson: return "poisson";
    case DistributionKind::pareto: return "pareto";
    case DistributionKind::exponential: return "exponential";
  }
  return "?";
}

double DistributionSpec::param(const std::string& name) const {
  if (auto it = params.find(name); it != params.end()) return it->second;
  if (kind == DistributionKind::histogram && name == "hi") return static_cast<double>(histogram_weights().size());
  if (auto it = default_params().find(name); it != default_params().end()) return it->second;
  throw InvalidParameter(name, "missing parameter");
}

std::vector<double> DistributionSpec::histogram_weights() const {
  std::vector<double> weights;
  for (std::size_t i = 0;; ++i) {
    auto it = params.find("w" + std::to_string(i));
    if (it == params.end()) break;
    weights.push_back(it->second);
  }
  return weights;
}

void DistributionSpec::validate() const {
  for (const auto& [name, v] : params)
    if (!std::isfinite(v)) throw InvalidParameter(name, "must be finite");
  switch (kind) {
    case DistributionKind::constant:
      break;
    case DistributionKind::uniform:
      if (!(param("lo") < param("hi"))) throw InvalidParameter("lo", "uniform requires lo < hi");
      break;
    case DistributionKind::zipfian: {
      double theta = param("theta");
      if (!(theta > 0 && theta <= 1)) throw InvalidParameter("theta", "zipfian theta must be in (0, 1]");
      double n = param("n");
      if (!(n >= 1) || n != std::floor(n) || n > 1e7) throw InvalidParameter("n", "item count must be an integer in [1, 1e7]");
      break;
    }
    case DistributionKind::histogram: {
      auto weights = histogram_weights();
      if (weights.empty()) throw InvalidParameter("w0", "histogram needs at least one weight");
      double sum = 0;
      for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] < 0) throw InvalidParameter("w" + std::to_string(i), "histogram weights must be nonnegative");
        sum += weights[i];
      }
      if (!(sum > 0)) throw InvalidParameter("w0", "histogram weights must have a positive sum");
      if (!(param("lo") < param("hi"))) throw InvalidParameter("lo", "histogram requires lo < hi");
      break;
    }
    case DistributionKind::poisson:
      require_positive(*this, "lambda");
      break;
    case DistributionKind::pareto:
      require_positive(*this, "shape");
      require_positive(*this, "scale");
      break;
    case DistributionKind::exponential:
      require_positive(*this, "rate");
      break;
  }
}

DistributionSpec DistributionSpec::parse(std::string_view text) {
  DistributionSpec spec;
  auto colon = text.find(':');
  std::string_view name = text.substr(0, colon);
  bool found = false;
  for (auto k : {DistributionKind::constant, DistributionKind::uniform, DistributionKind::zipfian,
                 DistributionKind::histogram, DistributionKind::poisson, DistributionKind::pareto,
                 DistributionKind::exponential}) {
    if (datagen::to_string(k) == name) {
      spec.kind = k;
      found = true;
    }
  }
  if (!found) throw InvalidParameter("kind", "unknown distribution '" + std::string(name) + "'");
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      auto comma = rest.find(',');
      std::string_view item = rest.substr(0, comma);
      auto eq = item.find('=');
      if (eq == std::string_view::npos) throw InvalidParameter(std::string(item), "expected key=value");
      std::string key(item.substr(0, eq));
      spec.params[key] = parse_double(key, item.substr(eq + 1));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
  }
  spec.validate();
  return spec;
}

std::string DistributionSpec::to_string() const {
  std::ostringstream out;
  out << datagen::to_string(kind);
  char sep = ':';
  for (const auto& [k, v] : params) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << sep << k << '=' << buf;
    sep = ',';
  }
  return out.str();
}

std::pair<double, double> nominal_range(const DistributionSpec& spec) {
  switch (spec.kind) {
    case DistributionKind::constant: return {spec.param("value"), spec.param("value")};
    case DistributionKind::uniform:
    case DistributionKind::histogram: return {spec.param("lo"), spec.param("hi")};
    case DistributionKind::zipfian: return {1.0, spec.param("n")};
    case DistributionKind::poisson: {
      double lambda = spec.param("lambda");
      return {0.0, std::ceil(lambda + 4 * std::sqrt(lambda))};
    }
    case DistributionKind::pareto:
      return {spec.param("scale"), spec.param("scale") * std::pow(100.0, 1.0 / spec.param("shape"))};
    case DistributionKind::exponential: return {0.0, std::log(100.0) / spec.param("rate")};
  }
  return {0, 0};
}

std::int64_t RandomSource::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi <= lo) return lo;
  auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());
  // rejection to avoid modulo bias
  std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % span);
  std::uint64_t x;
  do x = engine_();
  while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

double RandomSource::normal() {
  if (spare_normal_) {
    double v = *spare_normal_;
    spare_normal_.reset();
    return v;
  }
  double u, v, s;
  do {
    u = 2 * uniform01() - 1;
    v = 2 * uniform01() - 1;
    s = u * u + v * v;
  } while (s >= 1 || s == 0);
  double f = std::sqrt(-2 * std::log(s) / s);
  spare_normal_ = v * f;
  return u * f;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t ordinal) {
  std::uint64_t z = ordinal + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return seed ^ (z ^ (z >> 31));
}

Generator::Generator(DistributionSpec spec, std::uint64_t seed) : spec_(std::move(spec)), rng_(seed) {
  spec_.validate();
  if (spec_.kind == DistributionKind::zipfian) {
    auto n = static_cast<std::size_t>(spec_.param("n"));
    double theta = spec_.param("theta");
    cdf_.resize(n);
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) cdf_[i] = acc += 1.0 / std::pow(static_cast<double>(i + 1), theta);
  } else if (spec_.kind == DistributionKind::histogram) {
    double acc = 0;
    for (double w : spec_.histogram_weights()) cdf_.push_back(acc += w);
    hist_lo_ = spec_.param("lo");
    hist_width_ = (spec_.param("hi") - hist_lo_) / static_cast<double>(cdf_.size());
  }
}

Generator make_generator(const DistributionSpec& spec, std::uint64_t seed) {
  return Generator(spec, seed);
}

double Generator::next() {
  switch (spec_.kind) {
    case DistributionKind::constant:
      return spec_.param("value");
    case DistributionKind::uniform: {
      double lo = spec_.param("lo"), hi = spec_.param("hi");
      return lo + (hi - lo) * rng_.uniform01();
    }
    case DistributionKind::zipfian:
    case DistributionKind::histogram: {
      double target = rng_.uniform01() * cdf_.back();
      auto idx = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), target) - cdf_.begin());
      idx = std::min(idx, cdf_.size() - 1);
      if (spec_.kind == DistributionKind::zipfian) return static_cast<double>(idx + 1);
      return hist_lo_ + hist_width_ * (static_cast<double>(idx) + rng_.uniform01());
    }
    case DistributionKind::poisson:
      return static_cast<double>(next_poisson(spec_.param("lambda")));
    case DistributionKind::pareto:
      // inverse CDF; 1 - u lies in (0, 1]
      return spec_.param("scale") / std::pow(1.0 - rng_.uniform01(), 1.0 / spec_.param("shape"));
    case DistributionKind::exponential:
      return -std::log1p(-rng_.uniform01()) / spec_.param("rate");
  }
  return 0;
}

std::int64_t Generator::next_poisson(double lambda) {
  if (lambda < 10) {
    double limit = std::exp(-lambda), prod = rng_.uniform01();
    std::int64_t k = 0;
    while (prod > limit) {
      prod *= rng_.uniform01();
      ++k;
    }
    return k;
  }
  // Hörmann's transformed rejection (PTRS)
  const double slam = std::sqrt(lambda), loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2);
  for (;;) {
    double u = rng_.uniform01() - 0.5;
    double v = rng_.uniform01();
    double us = 0.5 - std::fabs(u);
    auto k = static_cast<std::int64_t>(std::floor((2 * a / us + b) * u + lambda + 0.43));
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0 || (us < 0.013 && v > us)) continue;
    double kd = static_cast<double>(k);
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <= -lambda + kd * loglam - std::lgamma(kd + 1))
      return k;
  }
}

void SpacingSpec::validate() const {
  if (mode == SpacingMode::even) {
    if (interval_ms <= 0) throw InvalidParameter("interval_ms", "must be positive");
  } else {
    inter_arrival.validate();
  }
}

TimestampState::TimestampState(const SpacingSpec& spacing, Timestamp start, std::uint64_t seed) : last_(start) {
  spacing.validate();
  if (spacing.mode == SpacingMode::uneven) gaps_.emplace(spacing.inter_arrival, seed);
}

Timestamp next_timestamp(const SpacingSpec& spacing, TimestampState& state) {
  std::int64_t gap = spacing.interval_ms;
  if (spacing.mode == SpacingMode::uneven) {
    double draw = std::ceil(state.gaps_->next());
    gap = draw < 1 ? 1 : static_cast<std::int64_t>(draw);
  }
  state.last_ += gap;
  return state.last_;
}

ValueGenerator::ValueGenerator(const ValueSpec& spec, std::uint64_t seed)
    : kind_(spec.kind),
      values_(spec.distribution, seed),
      lengths_(spec.string_length, derive_seed(seed, 0x5717)),
      max_len_(spec.max_len) {
  if (max_len_ == 0) throw InvalidParameter("max_len", "must be at least 1");
}

Value ValueGenerator::next() {
  switch (kind_) {
    case ValueKind::integer:
      return static_cast<std::int64_t>(std::nearbyint(values_.next()));
    case ValueKind::float64:
      return values_.next();
    case ValueKind::string: {
      static constexpr std::string_view alphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
      double draw = std::nearbyint(lengths_.next());
      auto len = static_cast<std::size_t>(std::clamp(draw, 1.0, static_cast<double>(max_len_)));
      std::string s(len, 'a');
      auto& rng = lengths_.source();
      for (auto& c : s) c = alphabet[static_cast<std::size_t>(rng.uniform_int(0, alphabet.size() - 1))];
      return s;
    }
  }
  return 0.0;
}

std::string serialize_payload(std::span<const DataPoint> batch) {
  std::string out;
  for (const auto& p : batch) {
    if (auto* s = std::get_if<std::string>(&p.value)) {
      out += *s;
      continue;
    }
    std::uint64_t bits = std::holds_alternative<double>(p.value)
                             ? std::bit_cast<std::uint64_t>(std::get<double>(p.value))
                             : static_cast<std::uint64_t>(std::get<std::int64_t>(p.value));
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
  return out;
}

}  // namespace iotbench::datagen
