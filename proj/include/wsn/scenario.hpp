#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "wsn/feed_store.hpp"
#include "wsn/power.hpp"

namespace wsn::sim {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field_path, const std::string& message);

  const std::string& field_path() const { return field_path_; }

 private:
  std::string field_path_;
};

struct NodeConfig {
  uint64_t addr64 = 0;
  double sleep_period_s = 28.0;  // 0 means the node never sleeps
  double awake_window_s = 0.5;
  double battery_mah = 2000.0;
  double initial_charge_mah = -1;  // <0 means full
  bool start_latched = false;
  std::string temperature_feed;    // defaults derived from the node index
  std::string voltage_feed;
};

struct CoordinatorConfig {
  double update_period_s = 1800.0;
  double poll_timeout_ms = 1000.0;
  int failure_reset_threshold = 3;
  double poll_period_s = 0.0;  // 0 means update_period_s
  bool flush_on_poll_complete = false;
  bool autonomous = false;  // nodes push samples instead of answering polls
};

struct LinkConfig {
  double latency_ms = 5.0;
  double drop_prob = 0.0;
  double corrupt_prob = 0.0;
  bool escaped = true;
};

struct EnvironmentConfig {
  enum class Model { constant, sinusoid, trace };
  Model model = Model::constant;
  double value_c = 25.0;
  double mean_c = 25.0;
  double amplitude_c = 5.0;
  double period_s = 86400.0;
  double phase_rad = 0.0;
  std::string trace_file;
  std::vector<std::pair<double, double>> trace;  // (time_s, celsius), sorted
  int adc_jitter_lsb = 0;

  double temperature_at(double t) const;
};

struct CloudConfig {
  std::string latency = "uniform:8:13";
  double outage_from_s = -1.0;  // posts fail inside [from, to)
  double outage_to_s = -1.0;
};

struct RuleConfig {
  std::string feed;
  cloud::Comparison comparison = cloud::Comparison::less_equal;
  double threshold = 2.1;
  std::string channel = "email_sim";
};

// Pins a node's sampled supply voltage from at_s onward, standing in for the
// bench power supply used to trigger alerts.
struct OverrideConfig {
  double at_s = 0.0;
  uint64_t node_addr64 = 0;
  double supply_volts = 2.1;
};

struct Scenario {
  uint64_t seed = 1;
  std::string api_key = "demo-key";
  std::vector<NodeConfig> nodes;
  CoordinatorConfig coordinator;
  LinkConfig link;
  EnvironmentConfig environment;
  CloudConfig cloud;
  std::vector<RuleConfig> rules;
  std::vector<OverrideConfig> overrides;
  power::PowerProfile profile;
  power::DutyCycleSpec timing;  // payload/period fields unused by the kernel
  double latch_threshold_v = 2.1;
};

uint64_t parse_addr64(const std::string& hex, const std::string& field_path);
std::string addr64_hex(uint64_t addr);

Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

}  // namespace wsn::sim
