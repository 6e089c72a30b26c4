#include "wsn/alert_drill.hpp"

#include <cstdio>
#include <stdexcept>

#include "wsn/netsim.hpp"

namespace wsn::cloud {

namespace {

constexpr double kForceAt = 60.0;  // third poll cycle of the drill scenario

sim::Scenario drill_scenario(const LatencyDistribution& latency, uint64_t seed) {
  sim::Scenario sc;
  sc.seed = seed;
  sc.api_key = "drill-key";

  sim::NodeConfig node;
  node.addr64 = 0x0013A200409C2679ULL;
  node.sleep_period_s = 0.0;  // bench node, always awake
  node.awake_window_s = 1.0;
  node.battery_mah = 2000.0;
  node.temperature_feed = "indoor-temperature";
  node.voltage_feed = "node-voltage";
  sc.nodes.push_back(node);

  sc.coordinator.update_period_s = 30.0;
  sc.coordinator.flush_on_poll_complete = true;  // report as soon as gathered
  sc.link.latency_ms = 0.0;
  sc.environment.model = sim::EnvironmentConfig::Model::constant;
  sc.environment.value_c = 25.0;
  sc.cloud.latency = latency.spec();
  sc.rules.push_back(sim::RuleConfig{"node-voltage", Comparison::less_equal,
                                     2.1, "email_sim"});
  sc.overrides.push_back(
      sim::OverrideConfig{kForceAt, node.addr64, 2.1});
  return sc;
}

}  // namespace

DrillResult run_alert_drill(int trials, const LatencyDistribution& latency,
                            uint64_t seed) {
  if (trials < 1) {
    throw std::domain_error("trials must be >= 1");
  }
  DrillResult result;
  result.latencies_s.reserve(trials);
  double sum = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    sim::Scenario sc = drill_scenario(latency, seed + static_cast<uint64_t>(trial));
    sim::SimReport report = sim::run_scenario(sc, kForceAt + 1.0);
    if (report.notifications.size() != 1) {
      throw std::logic_error("alert drill expected exactly one notification, got " +
                             std::to_string(report.notifications.size()));
    }
    double latency_s = report.notifications.front().delivered_at - kForceAt;
    result.latencies_s.push_back(latency_s);
    sum += latency_s;
  }
  result.mean_s = sum / static_cast<double>(trials);
  return result;
}

std::string drill_csv(const DrillResult& result) {
  std::string out = "trial,latency_s\n";
  char line[64];
  for (size_t i = 0; i < result.latencies_s.size(); ++i) {
    std::snprintf(line, sizeof line, "%zu,%.3f\n", i + 1, result.latencies_s[i]);
    out += line;
  }
  std::snprintf(line, sizeof line, "# mean_s = %.3f\n", result.mean_s);
  out += line;
  return out;
}

}  // namespace wsn::cloud
