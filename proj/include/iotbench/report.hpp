#pragma once

// Report documents: JSON with a fixed key order plus a plain-text summary.

#include <filesystem>
#include <string>

#include "iotbench/driver.hpp"

namespace iotbench::report {

std::string to_json(const driver::BenchmarkReport& report);
/// Inverse of to_json; raises InvalidParameter on schema mismatches.
driver::BenchmarkReport from_json(std::string_view text);

std::string summary(const driver::BenchmarkReport& report);

struct EmittedFiles {
  std::filesystem::path report;
  std::filesystem::path summary;
};

/// Writes report-<stamp>.json and summary-<stamp>.txt into `dir`; the stamp is
/// the run's start time.
EmittedFiles emit_report(const driver::BenchmarkReport& report, const std::filesystem::path& dir);

driver::BenchmarkReport load_report(const std::filesystem::path& path);

}  // namespace iotbench::report
