// iotbench: run the benchmark, sweep the analytic curves, check configs and
// inspect reports.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "iotbench/config.hpp"
#include "iotbench/driver.hpp"
#include "iotbench/report.hpp"
#include "iotbench/sweep.hpp"

using namespace iotbench;

namespace {

constexpr int kExitConfig = 2;
constexpr const char* kOutputEnv = "IOTBENCH_OUTPUT_DIR";

int write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IoT time-series database benchmark harness"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run the full two-iteration benchmark");
  std::string config_path, out_dir;
  bool desk_scale = false;
  std::vector<std::string> sets;
  std::optional<int> clients, sensors, instances;
  std::optional<std::int64_t> records;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> adapter;
  bool quiet = false;
  run->add_option("--config", config_path, "key=value config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Report directory (default $" + std::string(kOutputEnv) + " or ./reports)");
  run->add_flag("--desk-scale", desk_scale, "Relax the full-scale duration floors");
  run->add_option("--clients", clients, "k");
  run->add_option("--sensors", sensors, "m_s");
  run->add_option("--records", records, "N_p");
  run->add_option("--driver-instances", instances, "n_i");
  run->add_option("--seed", seed, "Master seed");
  run->add_option("--adapter", adapter, "sut.adapter");
  run->add_option("--set", sets, "Override any key: --set key=value");
  run->add_flag("--quiet", quiet, "No progress lines");

  // check-config
  auto* check = app.add_subcommand("check-config", "Validate a config and print it normalized");
  std::string check_path;
  std::vector<std::string> check_sets;
  check->add_option("config", check_path, "Config file")->required()->check(CLI::ExistingFile);
  check->add_option("--set", check_sets, "Override any key: --set key=value");

  // show-report
  auto* show = app.add_subcommand("show-report", "Print the summary of a report document");
  std::string report_path;
  show->add_option("report", report_path, "report-*.json")->required()->check(CLI::ExistingFile);

  // sweep-scalability
  auto* sweep_s = app.add_subcommand("sweep-scalability", "Model IoTps over node counts (CSV)");
  double rate = 4100, t0 = 1, ts = 1;
  std::string m_grid = "1..10", curves = "1.0:linear,0.9:decaying", sweep_out;
  sweep_s->add_option("--rate", rate, "Baseline R in kIoTps")->capture_default_str();
  sweep_s->add_option("--m", m_grid, "Node counts, e.g. 1..10 or 1,2,4")->capture_default_str();
  sweep_s->add_option("--curves", curves, "w_s:mode list")->capture_default_str();
  sweep_s->add_option("--t0", t0, "Stable phase length")->capture_default_str();
  sweep_s->add_option("--ts", ts, "Scale-out phase length")->capture_default_str();
  sweep_s->add_option("--output", sweep_out, "CSV file (default stdout)");

  // sweep-cost
  auto* sweep_c = app.add_subcommand("sweep-cost", "Storage cost or $/kIoTps over compression ratios (CSV)");
  std::string kind = "cost", r_grid = "1,2,5,10,20,50,100", cost_out;
  double iotps = 4.1e6;
  CostModel cost;
  sweep_c->add_option("--kind", kind, "cost (r,storage_cost,total_cost) or price (r,usd_per_kiotps)")
      ->check(CLI::IsMember({"cost", "price"}))
      ->capture_default_str();
  sweep_c->add_option("--r", r_grid, "Compression ratios")->capture_default_str();
  sweep_c->add_option("--iotps", iotps, "Throughput in IoTps")->capture_default_str();
  sweep_c->add_option("--c0", cost.c0, "System cost before scale-out ($)")->capture_default_str();
  sweep_c->add_option("--cs", cost.cs, "System cost after scale-out ($)")->capture_default_str();
  sweep_c->add_option("--record-cost", cost.per_record_storage_cost, "$ per 16-byte record")->capture_default_str();
  sweep_c->add_option("--record-bytes", cost.record_bytes, "Bytes per record")->capture_default_str();
  sweep_c->add_option("--output", cost_out, "CSV file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  auto to_properties = [](const std::vector<std::string>& items) {
    driver::Properties out;
    for (const auto& s : items) {
      auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw InvalidParameter("--set", "expected key=value, got '" + s + "'");
      out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    return out;
  };

  try {
    if (*run) {
      auto overrides = to_properties(sets);
      if (desk_scale) overrides.emplace_back("desk_scale", "true");
      if (clients) overrides.emplace_back("clients", std::to_string(*clients));
      if (sensors) overrides.emplace_back("sensors", std::to_string(*sensors));
      if (records) overrides.emplace_back("records", std::to_string(*records));
      if (instances) overrides.emplace_back("driver_instances", std::to_string(*instances));
      if (seed) overrides.emplace_back("seed", std::to_string(*seed));
      if (adapter) overrides.emplace_back("sut.adapter", *adapter);
      auto config = driver::load_config(config_path, overrides);

      if (out_dir.empty()) {
        const char* env = std::getenv(kOutputEnv);
        out_dir = env && *env ? env : "reports";
      }
      driver::RunOptions options;
      options.log = quiet ? nullptr : &std::cerr;
      options.output_dir = out_dir;
      auto result = driver::run_benchmark(config, options);
      auto files = report::emit_report(result, out_dir);
      std::cout << report::summary(result) << "\nreport:  " << files.report.string()
                << "\nsummary: " << files.summary.string() << "\n";
      return result.exit_code();
    }
    if (*check) {
      auto config = driver::load_config(check_path, to_properties(check_sets));
      std::cout << driver::render_config(driver::config_echo(config));
      int code = 0;
      for (const auto& c : driver::prerequisite_checks(config)) {
        std::cerr << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  " << c.detail << "\n";
        if (!c.passed) code = kExitConfig;
      }
      return code;
    }
    if (*show) {
      auto r = report::load_report(report_path);
      std::cout << report::summary(r);
      return r.exit_code();
    }
    if (*sweep_s) {
      return write_output(
          sweep::scalability_csv(rate, sweep::parse_int_grid(m_grid), sweep::parse_curves(curves), t0, ts), sweep_out);
    }
    if (*sweep_c) {
      auto ratios = sweep::parse_double_grid(r_grid);
      return write_output(kind == "cost" ? sweep::cost_csv(cost, iotps, ratios) : sweep::price_csv(cost, iotps, ratios),
                          cost_out);
    }
  } catch (const InvalidParameter& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
