#pragma once

#include <cstdint>
#include <string>

#include "iotbench/metrics.hpp"
#include "iotbench/sut.hpp"
#include "iotbench/workload.hpp"

namespace iotbench::driver {

/// paced: each client spreads its budget over the planned run length.
/// open: clients issue as fast as the SUT accepts.
/// automatic: open on simulated-clock adapters, paced otherwise.
enum class Pacing { automatic, paced, open };

std::string_view to_string(Pacing p);
Pacing pacing_from_string(std::string_view s);

inline constexpr double kFullScaleMinRunSeconds = 1800;
inline constexpr double kDeskScaleFloorSeconds = 5;

struct RunConfig {
  int sensors = 100;        // m_s
  int clients = 3;          // k
  int driver_instances = 1;  // n_i
  std::int64_t records = 0;  // N_p
  double warmup_seconds = kFullScaleMinRunSeconds;
  double min_run_seconds = kFullScaleMinRunSeconds;
  double min_per_sensor_rate = 20;
  std::uint64_t seed = 1;
  bool desk_scale = false;

  workload::DataConfig data;
  std::string sample_file;  // replay/model methods
  workload::QueryMix mix;
  std::size_t batch_size = 100;

  std::string sut_adapter = "reference";
  sut::SutOptions sut_options;
  CostModel cost;

  Pacing pacing = Pacing::automatic;
  std::size_t verify_sample = 1000;
  double progress_interval = 5;
  double scheduler_tick = 0.1;

  /// Structural invariants; throws InvalidParameter naming the config key.
  void validate() const;
};

}  // namespace iotbench::driver
