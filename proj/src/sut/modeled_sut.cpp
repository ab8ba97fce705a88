#include "iotbench/modeled_sut.hpp"

#include <cmath>
#include <thread>

namespace iotbench::sut {

namespace {

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double out = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(out)) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw InvalidParameter("sut." + key, "expected a number, got '" + v + "'");
  }
}

}  // namespace

void ScalabilityLaw::validate() const {
  if (!(rate > 0) || !std::isfinite(rate)) throw InvalidParameter("rate", "must be positive");
  if (!(w_s > 0 && w_s <= 1)) throw InvalidParameter("w_s", "must be in (0, 1]");
}

double ScalabilityLaw::factor(int m) const { return linearity_factor(w_s, m, mode); }

double ScalabilityLaw::post_rate(double current_rate, int m) const {
  if (m < 1) throw InvalidParameter("m", "must be at least 1");
  return current_rate * (static_cast<double>(m + 1) / m) * factor(m);
}

ModeledSutOptions ModeledSutOptions::from(const SutOptions& options) {
  ModeledSutOptions out;
  for (const auto& [key, value] : options) {
    if (key == "adapter") continue;
    if (key == "rate") {
      out.law.rate = parse_double(key, value);
    } else if (key == "w_s") {
      out.law.w_s = parse_double(key, value);
    } else if (key == "mode") {
      try {
        out.law.mode = law_mode_from_string(value);
      } catch (const InvalidParameter& e) {
        throw InvalidParameter("sut.mode", e.reason());
      }
    } else if (key == "nodes") {
      double n = parse_double(key, value);
      if (n < 1 || n != std::floor(n)) throw InvalidParameter("sut.nodes", "must be a positive integer");
      out.nodes = static_cast<int>(n);
    } else if (key == "scalable") {
      if (value != "true" && value != "false") throw InvalidParameter("sut.scalable", "expected true/false");
      out.scalable = value == "true";
    } else if (key == "ratio") {
      out.synthetic_ratio = parse_double(key, value);
      if (!(out.synthetic_ratio > 0)) throw InvalidParameter("sut.ratio", "must be positive");
    } else if (key == "clock") {
      if (value != "wall" && value != "simulated") throw InvalidParameter("sut.clock", "expected wall or simulated");
      out.simulated = value == "simulated";
    } else {
      throw InvalidParameter("sut." + key, "unknown option for the modeled adapter");
    }
  }
  try {
    out.law.validate();
  } catch (const InvalidParameter& e) {
    throw InvalidParameter("sut." + e.field(), e.reason());
  }
  return out;
}

ModeledSut::ModeledSut(ModeledSutOptions options)
    : options_(options), rate_(options.law.rate), nodes_(options.nodes), clock_(options.law.rate) {
  options_.law.validate();
  if (options_.nodes < 1) throw InvalidParameter("sut.nodes", "must be at least 1");
}

SutDescriptor ModeledSut::descriptor() const {
  std::lock_guard lock(mu_);
  return {"modeled", nodes_, options_.scalable};
}

double ModeledSut::current_rate() const {
  std::lock_guard lock(mu_);
  return rate_;
}

InsertAck ModeledSut::insert(std::span<const DataPoint> batch) {
  InsertAck ack;
  ack.points = static_cast<std::int64_t>(batch.size());
  for (const auto& p : batch) ack.bytes += p.encoded_size;
  if (batch.empty()) return ack;

  steady::time_point done;
  {
    std::lock_guard lock(mu_);
    bytes_ += ack.bytes;
    points_ += ack.points;
    if (options_.simulated) {
      clock_.add_work(ack.points);
      return ack;
    }
    // Reserve the next slot of the shared service pipe.
    auto now = steady::now();
    auto start = std::max(now, next_free_);
    auto cost = std::chrono::duration_cast<steady::duration>(
        std::chrono::duration<double>(static_cast<double>(ack.points) / rate_));
    next_free_ = start + cost;
    done = next_free_;
  }
  std::this_thread::sleep_until(done);
  return ack;
}

std::vector<Row> ModeledSut::query(const QuerySpec& spec) {
  spec.validate();
  return {};
}

ScaleOutResult ModeledSut::scale_out() {
  std::lock_guard lock(mu_);
  if (!options_.scalable) return {false, {"modeled", nodes_, false}};
  rate_ = options_.law.post_rate(rate_, nodes_);
  ++nodes_;
  if (options_.simulated) clock_.set_rate(rate_);
  return {true, {"modeled", nodes_, true}};
}

std::int64_t ModeledSut::disk_usage() {
  std::lock_guard lock(mu_);
  return static_cast<std::int64_t>(std::llround(static_cast<double>(bytes_) / options_.synthetic_ratio));
}

std::optional<std::int64_t> ModeledSut::stored_points() {
  std::lock_guard lock(mu_);
  return points_;
}

void ModeledSut::cleanup() {
  std::lock_guard lock(mu_);
  rate_ = options_.law.rate;
  nodes_ = options_.nodes;
  bytes_ = 0;
  points_ = 0;
  next_free_ = {};
  clock_.set_rate(rate_);
  clock_.reset();
}

}  // namespace iotbench::sut
