#pragma once

// Sensor value and timestamp generation: parametric distributions, periodic
// replay of a loaded sample, and a fitted quantile + AR(1) generator model.
// Every stream is a pure function of its spec and seed.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "iotbench/types.hpp"

namespace iotbench::datagen {

enum class DistributionKind { constant, uniform, zipfian, histogram, poisson, pareto, exponential };

std::string_view to_string(DistributionKind kind);

struct DistributionSpec {
  DistributionKind kind = DistributionKind::constant;
  std::map<std::string, double> params;

  /// Throws InvalidParameter naming the offending field.
  void validate() const;

  /// Parameter lookup with the documented defaults (lambda=10, shape=3,
  /// scale=1, rate=1, n=1000, theta=0.99, lo=0, hi=1, value=0).
  double param(const std::string& name) const;

  /// Textual form `kind:key=value,key=value`; histogram weights are w0, w1, ...
  static DistributionSpec parse(std::string_view text);
  std::string to_string() const;

  std::vector<double> histogram_weights() const;

  static DistributionSpec constant(double v) { return {DistributionKind::constant, {{"value", v}}}; }
  static DistributionSpec uniform(double lo, double hi) {
    return {DistributionKind::uniform, {{"lo", lo}, {"hi", hi}}};
  }
  static DistributionSpec exponential(double rate) { return {DistributionKind::exponential, {{"rate", rate}}}; }
  static DistributionSpec pareto(double shape, double scale) {
    return {DistributionKind::pareto, {{"shape", shape}, {"scale", scale}}};
  }
  static DistributionSpec poisson(double lambda) { return {DistributionKind::poisson, {{"lambda", lambda}}}; }
  static DistributionSpec zipfian(double n, double theta) {
    return {DistributionKind::zipfian, {{"n", n}, {"theta", theta}}};
  }

  bool operator==(const DistributionSpec&) const = default;
};

/// Closed interval a distribution's draws are expected to fall in. Unbounded
/// tails are cut at their 99th percentile.
std::pair<double, double> nominal_range(const DistributionSpec& spec);

/// Seeded source of uniform bits. The transforms built on top are written
/// here rather than taken from <random> so streams agree across standard libraries.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Standard normal (Box-Muller, polar form).
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

/// Per-thread seed derivation: seed XOR splitmix64(ordinal).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t ordinal);

/// A deterministic draw stream for one distribution. Single owner.
class Generator {
 public:
  Generator(DistributionSpec spec, std::uint64_t seed);

  double next();
  const DistributionSpec& spec() const noexcept { return spec_; }
  RandomSource& source() noexcept { return rng_; }

 private:
  std::int64_t next_poisson(double lambda);

  DistributionSpec spec_;
  RandomSource rng_;
  std::vector<double> cdf_;  // zipfian / histogram cumulative weights
  double hist_lo_ = 0, hist_width_ = 1;
};

Generator make_generator(const DistributionSpec& spec, std::uint64_t seed);

// --- timestamps ---------------------------------------------------------

enum class SpacingMode { even, uneven };

struct SpacingSpec {
  SpacingMode mode = SpacingMode::even;
  std::int64_t interval_ms = 1000;
  DistributionSpec inter_arrival = DistributionSpec::exponential(0.001);

  void validate() const;
};

class TimestampState {
 public:
  TimestampState(const SpacingSpec& spacing, Timestamp start, std::uint64_t seed);

  Timestamp last() const noexcept { return last_; }

 private:
  friend Timestamp next_timestamp(const SpacingSpec& spacing, TimestampState& state);
  Timestamp last_;
  std::optional<Generator> gaps_;
};

/// Returns a timestamp strictly greater than the previous one. Uneven gaps are
/// rounded up to whole milliseconds, minimum 1.
Timestamp next_timestamp(const SpacingSpec& spacing, TimestampState& state);

// --- values -------------------------------------------------------------

inline constexpr std::size_t kDefaultMaxStringLen = 256;

struct ValueSpec {
  ValueKind kind = ValueKind::float64;
  DistributionSpec distribution = DistributionSpec::pareto(3, 1);
  DistributionSpec string_length = DistributionSpec::uniform(8, 64);
  std::size_t max_len = kDefaultMaxStringLen;
};

/// Integer draws round half-to-even; strings draw a clamped length then
/// characters from [a-z0-9].
class ValueGenerator {
 public:
  ValueGenerator(const ValueSpec& spec, std::uint64_t seed);
  Value next();
  ValueKind kind() const noexcept { return kind_; }

 private:
  ValueKind kind_;
  Generator values_;
  Generator lengths_;
  std::size_t max_len_;
};

/// Value payload bytes of a batch as accounted into S_i: numbers as 8-byte
/// little-endian, strings as raw bytes.
std::string serialize_payload(std::span<const DataPoint> batch);

// --- periodic sample replay ----------------------------------------------

struct SamplePoint {
  Timestamp timestamp = 0;
  Value value;
};

struct SampleRow {
  std::string sensor_id;
  SamplePoint point;
};

/// Parses `sensor_id,timestamp_ms,value` CSV. Errors carry the line number.
std::vector<SampleRow> parse_sample_csv(std::string_view text);
std::vector<SampleRow> load_sample_csv(const std::filesystem::path& path);

inline constexpr std::size_t kFullScaleSetCount = 10;
inline constexpr std::size_t kFullScalePointsPerSet = 6'710'886;
inline constexpr std::size_t kDeskScalePointsPerSet = 10'000;

struct SampleSet {
  std::vector<std::vector<SamplePoint>> sets;
  std::size_t set_count = 0;
  std::size_t points_per_set = 0;

  /// Splits `points` into `set_count` contiguous slices of `points_per_set`
  /// (0 = as many as fit). Trailing points that do not fill a set are dropped.
  static SampleSet from_points(std::span<const SamplePoint> points, std::size_t set_count = kFullScaleSetCount,
                               std::size_t points_per_set = 0);
  std::size_t total_points() const noexcept { return set_count * points_per_set; }
};

class ReplayState {
 public:
  ReplayState(const SampleSet& sample, std::size_t thread_index, std::string sensor_id, Timestamp start);

  std::size_t bound_set() const noexcept { return set_; }

 private:
  friend DataPoint replay_next(const SampleSet& sample, ReplayState& state);
  std::size_t set_;
  std::string sensor_id_;
  std::uint64_t emitted_ = 0;
  Timestamp next_ts_;
};

/// Emits the bound set's values cyclically. Timestamps keep the sample's
/// inter-arrival gaps; the wrap from last to first reuses the first gap.
DataPoint replay_next(const SampleSet& sample, ReplayState& state);

// --- fitted generator model ----------------------------------------------

inline constexpr std::size_t kQuantileKnots = 256;

struct GeneratorModel {
  std::array<double, kQuantileKnots> quantile_table{};
  double ar1_coeff = 0;
  double residual_sd = 0;
  double gap_mean = 1;
  double gap_sd = 0;

  /// Piecewise-linear inverse CDF; knot j sits at rank j/255.
  double quantile(double rank) const;
};

/// Deterministic fit: empirical quantile knots of the values plus the lag-1
/// autocorrelation of their normal scores.
GeneratorModel fit_model(std::span<const SamplePoint> sample);

class SynthState {
 public:
  SynthState(std::string sensor_id, Timestamp start, std::uint64_t seed);

 private:
  friend DataPoint synth_next(const GeneratorModel& model, SynthState& state);
  std::string sensor_id_;
  Timestamp last_;
  RandomSource rng_;
  std::optional<double> score_;
};

/// Draws a float64 point: AR(1) in normal-score space mapped through the quantile table.
DataPoint synth_next(const GeneratorModel& model, SynthState& state);

}  // namespace iotbench::datagen
