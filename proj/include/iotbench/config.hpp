#pragma once

// Line-oriented `key=value` run configuration (`#` starts a comment).

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "iotbench/run_config.hpp"

namespace iotbench::driver {

using Properties = std::vector<std::pair<std::string, std::string>>;

/// Parses config text, then applies `overrides` in order. Unknown keys and
/// malformed lines raise InvalidParameter (field = key, or `line <n>`);
/// `records` is required. The result is validated.
RunConfig parse_config(std::string_view text, const Properties& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const Properties& overrides = {});

/// Every RunConfig key with its current value, in a stable order; `sut.*`
/// adapter options follow the fixed keys. parse_config(render_config(echo)) == config.
Properties config_echo(const RunConfig& config);
std::string render_config(const Properties& properties);

/// Known fixed keys (excluding free-form `sut.*` options).
std::vector<std::string> config_keys();

/// Shortest decimal that round-trips.
std::string format_number(double v);

}  // namespace iotbench::driver
