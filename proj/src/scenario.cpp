#include "wsn/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>

namespace wsn::sim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path, msg);
}

const json* find(const json& j, const std::string& key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double get_number(const json& j, const std::string& key, double fallback,
                  const std::string& path) {
  const json* v = find(j, key);
  if (v == nullptr) return fallback;
  if (!v->is_number()) fail(path + "." + key, "expected a number");
  return v->get<double>();
}

bool get_bool(const json& j, const std::string& key, bool fallback,
              const std::string& path) {
  const json* v = find(j, key);
  if (v == nullptr) return fallback;
  if (!v->is_boolean()) fail(path + "." + key, "expected a boolean");
  return v->get<bool>();
}

std::string get_string(const json& j, const std::string& key,
                       const std::string& fallback, const std::string& path) {
  const json* v = find(j, key);
  if (v == nullptr) return fallback;
  if (!v->is_string()) fail(path + "." + key, "expected a string");
  return v->get<std::string>();
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

std::vector<std::pair<double, double>> load_trace(const std::string& file,
                                                  const std::string& path) {
  std::ifstream in(file);
  if (!in) fail(path, "cannot open trace file '" + file + "'");
  std::vector<std::pair<double, double>> points;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    double t = 0, c = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf", &t, &c) != 2) {
      fail(path, "trace line " + std::to_string(lineno) +
                     " is not 'time_s,celsius'");
    }
    points.emplace_back(t, c);
  }
  if (points.empty()) fail(path, "trace file '" + file + "' has no samples");
  std::sort(points.begin(), points.end());
  return points;
}

}  // namespace

ConfigError::ConfigError(std::string field_path, const std::string& message)
    : std::runtime_error(field_path + ": " + message),
      field_path_(std::move(field_path)) {}

double EnvironmentConfig::temperature_at(double t) const {
  switch (model) {
    case Model::constant:
      return value_c;
    case Model::sinusoid:
      return mean_c + amplitude_c * std::sin(2.0 * std::numbers::pi * t / period_s +
                                             phase_rad);
    case Model::trace: {
      // step-hold on the previous sample
      if (trace.empty()) return 0.0;
      auto it = std::upper_bound(
          trace.begin(), trace.end(), std::make_pair(t, std::numeric_limits<double>::max()));
      if (it == trace.begin()) return trace.front().second;
      return std::prev(it)->second;
    }
  }
  return 0.0;
}

uint64_t parse_addr64(const std::string& hex, const std::string& field_path) {
  std::string s = hex;
  if (s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0) s = s.substr(2);
  if (s.empty() || s.size() > 16) {
    fail(field_path, "expected up to 16 hex digits, got '" + hex + "'");
  }
  uint64_t v = 0;
  for (char c : s) {
    int n;
    if (c >= '0' && c <= '9') n = c - '0';
    else if (c >= 'a' && c <= 'f') n = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') n = c - 'A' + 10;
    else fail(field_path, "invalid hex digit '" + std::string(1, c) + "'");
    v = (v << 4) | static_cast<uint64_t>(n);
  }
  return v;
}

std::string addr64_hex(uint64_t addr) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llX", static_cast<unsigned long long>(addr));
  return buf;
}

Scenario parse_scenario(const json& j) {
  require_object(j, "scenario");
  Scenario sc;

  const json* seed = find(j, "seed");
  if (seed != nullptr) {
    if (!seed->is_number_unsigned()) fail("seed", "expected a non-negative integer");
    sc.seed = seed->get<uint64_t>();
  }
  sc.api_key = get_string(j, "api_key", sc.api_key, "scenario");

  const json* nodes = find(j, "nodes");
  if (nodes == nullptr || !nodes->is_array() || nodes->empty()) {
    fail("nodes", "expected a non-empty array");
  }
  std::set<uint64_t> seen;
  for (size_t i = 0; i < nodes->size(); ++i) {
    const json& n = (*nodes)[i];
    std::string path = "nodes[" + std::to_string(i) + "]";
    require_object(n, path);
    NodeConfig cfg;
    const json* addr = find(n, "addr64");
    if (addr == nullptr || !addr->is_string()) {
      fail(path + ".addr64", "expected a hex string");
    }
    cfg.addr64 = parse_addr64(addr->get<std::string>(), path + ".addr64");
    if (!seen.insert(cfg.addr64).second) {
      fail(path + ".addr64", "duplicate node address");
    }
    cfg.sleep_period_s = get_number(n, "sleep_period", cfg.sleep_period_s, path);
    if (cfg.sleep_period_s < 0) fail(path + ".sleep_period", "must be >= 0");
    cfg.awake_window_s = get_number(n, "awake_window", cfg.awake_window_s, path);
    if (cfg.awake_window_s <= 0) fail(path + ".awake_window", "must be > 0");
    cfg.battery_mah = get_number(n, "battery_mAh", cfg.battery_mah, path);
    if (cfg.battery_mah <= 0) fail(path + ".battery_mAh", "must be > 0");
    cfg.initial_charge_mah =
        get_number(n, "initial_charge_mAh", cfg.battery_mah, path);
    if (cfg.initial_charge_mah < 0 || cfg.initial_charge_mah > cfg.battery_mah) {
      fail(path + ".initial_charge_mAh", "must be in [0, battery_mAh]");
    }
    cfg.start_latched = get_bool(n, "latched", false, path);
    std::string index = std::to_string(i + 1);
    cfg.temperature_feed = get_string(n, "temperature_feed",
                                      "indoor-temperature-" + index, path);
    cfg.voltage_feed = get_string(n, "voltage_feed", "node-voltage-" + index, path);
    sc.nodes.push_back(std::move(cfg));
  }

  if (const json* c = find(j, "coordinator")) {
    require_object(*c, "coordinator");
    sc.coordinator.update_period_s =
        get_number(*c, "update_period_s", sc.coordinator.update_period_s, "coordinator");
    if (sc.coordinator.update_period_s <= 0) {
      fail("coordinator.update_period_s", "must be > 0");
    }
    sc.coordinator.poll_timeout_ms =
        get_number(*c, "poll_timeout_ms", sc.coordinator.poll_timeout_ms, "coordinator");
    if (sc.coordinator.poll_timeout_ms <= 0) {
      fail("coordinator.poll_timeout_ms", "must be > 0");
    }
    sc.coordinator.failure_reset_threshold = static_cast<int>(get_number(
        *c, "failure_reset_threshold", sc.coordinator.failure_reset_threshold,
        "coordinator"));
    if (sc.coordinator.failure_reset_threshold < 1) {
      fail("coordinator.failure_reset_threshold", "must be >= 1");
    }
    sc.coordinator.poll_period_s =
        get_number(*c, "poll_period_s", 0.0, "coordinator");
    if (sc.coordinator.poll_period_s < 0) {
      fail("coordinator.poll_period_s", "must be >= 0");
    }
    sc.coordinator.flush_on_poll_complete = get_bool(
        *c, "flush_on_poll_complete", sc.coordinator.flush_on_poll_complete,
        "coordinator");
    std::string mode = get_string(*c, "mode", "polling", "coordinator");
    if (mode == "polling") {
      sc.coordinator.autonomous = false;
    } else if (mode == "autonomous") {
      sc.coordinator.autonomous = true;
    } else {
      fail("coordinator.mode", "expected 'polling' or 'autonomous'");
    }
  }

  if (const json* l = find(j, "link")) {
    require_object(*l, "link");
    sc.link.latency_ms = get_number(*l, "latency_ms", sc.link.latency_ms, "link");
    if (sc.link.latency_ms < 0) fail("link.latency_ms", "must be >= 0");
    sc.link.drop_prob = get_number(*l, "drop_prob", sc.link.drop_prob, "link");
    if (sc.link.drop_prob < 0 || sc.link.drop_prob > 1) {
      fail("link.drop_prob", "must be in [0, 1]");
    }
    sc.link.corrupt_prob = get_number(*l, "corrupt_prob", sc.link.corrupt_prob, "link");
    if (sc.link.corrupt_prob < 0 || sc.link.corrupt_prob > 1) {
      fail("link.corrupt_prob", "must be in [0, 1]");
    }
    sc.link.escaped = get_bool(*l, "escaped", sc.link.escaped, "link");
  }

  if (const json* e = find(j, "environment")) {
    require_object(*e, "environment");
    std::string model = get_string(*e, "model", "constant", "environment");
    if (model == "constant") {
      sc.environment.model = EnvironmentConfig::Model::constant;
      sc.environment.value_c = get_number(*e, "value_c", sc.environment.value_c,
                                          "environment");
    } else if (model == "sinusoid") {
      sc.environment.model = EnvironmentConfig::Model::sinusoid;
      sc.environment.mean_c = get_number(*e, "mean_c", sc.environment.mean_c,
                                         "environment");
      sc.environment.amplitude_c =
          get_number(*e, "amplitude_c", sc.environment.amplitude_c, "environment");
      sc.environment.period_s =
          get_number(*e, "period_s", sc.environment.period_s, "environment");
      if (sc.environment.period_s <= 0) fail("environment.period_s", "must be > 0");
      sc.environment.phase_rad =
          get_number(*e, "phase_rad", sc.environment.phase_rad, "environment");
    } else if (model == "trace") {
      sc.environment.model = EnvironmentConfig::Model::trace;
      sc.environment.trace_file = get_string(*e, "file", "", "environment");
      if (sc.environment.trace_file.empty()) {
        fail("environment.file", "trace model requires a file");
      }
      sc.environment.trace =
          load_trace(sc.environment.trace_file, "environment.file");
    } else {
      fail("environment.model", "expected constant, sinusoid or trace");
    }
    sc.environment.adc_jitter_lsb = static_cast<int>(
        get_number(*e, "adc_jitter_lsb", 0.0, "environment"));
    if (sc.environment.adc_jitter_lsb < 0) {
      fail("environment.adc_jitter_lsb", "must be >= 0");
    }
  }

  if (const json* c = find(j, "cloud")) {
    require_object(*c, "cloud");
    sc.cloud.latency = get_string(*c, "latency", sc.cloud.latency, "cloud");
    try {
      cloud::LatencyDistribution::parse(sc.cloud.latency);
    } catch (const cloud::ServiceError& err) {
      fail("cloud.latency", err.detail());
    }
    sc.cloud.outage_from_s = get_number(*c, "outage_from_s", -1.0, "cloud");
    sc.cloud.outage_to_s = get_number(*c, "outage_to_s", -1.0, "cloud");
  }

  if (const json* rules = find(j, "rules")) {
    if (!rules->is_array()) fail("rules", "expected an array");
    for (size_t i = 0; i < rules->size(); ++i) {
      const json& r = (*rules)[i];
      std::string path = "rules[" + std::to_string(i) + "]";
      require_object(r, path);
      RuleConfig cfg;
      cfg.feed = get_string(r, "feed", "", path);
      if (cfg.feed.empty()) fail(path + ".feed", "required");
      try {
        cfg.comparison =
            cloud::parse_comparison(get_string(r, "comparison", "<=", path));
      } catch (const cloud::ServiceError& err) {
        fail(path + ".comparison", err.detail());
      }
      cfg.threshold = get_number(r, "threshold", cfg.threshold, path);
      cfg.channel = get_string(r, "channel", cfg.channel, path);
      sc.rules.push_back(std::move(cfg));
    }
  }

  if (const json* ov = find(j, "overrides")) {
    if (!ov->is_array()) fail("overrides", "expected an array");
    for (size_t i = 0; i < ov->size(); ++i) {
      const json& o = (*ov)[i];
      std::string path = "overrides[" + std::to_string(i) + "]";
      require_object(o, path);
      OverrideConfig cfg;
      cfg.at_s = get_number(o, "at_s", 0.0, path);
      if (cfg.at_s < 0) fail(path + ".at_s", "must be >= 0");
      const json* node = find(o, "node");
      if (node == nullptr || !node->is_string()) {
        fail(path + ".node", "expected a hex string");
      }
      cfg.node_addr64 = parse_addr64(node->get<std::string>(), path + ".node");
      cfg.supply_volts = get_number(o, "supply_volts", cfg.supply_volts, path);
      if (cfg.supply_volts < 0 || cfg.supply_volts > 3.6) {
        fail(path + ".supply_volts", "must be in [0, 3.6]");
      }
      bool known = false;
      for (const NodeConfig& n : sc.nodes) known |= n.addr64 == cfg.node_addr64;
      if (!known) fail(path + ".node", "does not match any configured node");
      sc.overrides.push_back(cfg);
    }
  }

  if (const json* p = find(j, "power")) {
    require_object(*p, "power");
    sc.profile.i_onoff_ma = get_number(*p, "i_onoff_ma", sc.profile.i_onoff_ma, "power");
    sc.profile.i_listen_ma = get_number(*p, "i_listen_ma", sc.profile.i_listen_ma, "power");
    sc.profile.i_trans_ma = get_number(*p, "i_trans_ma", sc.profile.i_trans_ma, "power");
    sc.profile.i_sleep_ma = get_number(*p, "i_sleep_ma", sc.profile.i_sleep_ma, "power");
    sc.profile.nominal_voltage_v =
        get_number(*p, "nominal_voltage_v", sc.profile.nominal_voltage_v, "power");
    sc.profile.rail_full_v = get_number(*p, "rail_full_v", sc.profile.rail_full_v, "power");
    sc.profile.rail_empty_v =
        get_number(*p, "rail_empty_v", sc.profile.rail_empty_v, "power");
    try {
      // capacity comes from each node's battery_mAh; keep the default here
      validate(sc.profile);
    } catch (const std::domain_error& err) {
      fail("power", err.what());
    }
  }

  if (const json* t = find(j, "timing")) {
    require_object(*t, "timing");
    sc.timing.t_onoff_s = get_number(*t, "t_onoff_s", sc.timing.t_onoff_s, "timing");
    sc.timing.t_listen_s = get_number(*t, "t_listen_s", sc.timing.t_listen_s, "timing");
    sc.timing.frame_overhead_bytes = static_cast<int>(get_number(
        *t, "frame_overhead_bytes", sc.timing.frame_overhead_bytes, "timing"));
    sc.timing.bitrate_bps = get_number(*t, "bitrate_bps", sc.timing.bitrate_bps, "timing");
    if (sc.timing.t_onoff_s < 0 || sc.timing.t_listen_s < 0 ||
        sc.timing.frame_overhead_bytes < 0 || sc.timing.bitrate_bps <= 0) {
      fail("timing", "invalid timing parameters");
    }
  }

  sc.latch_threshold_v = get_number(j, "latch_threshold_v", sc.latch_threshold_v,
                                    "scenario");

  for (const RuleConfig& rule : sc.rules) {
    bool known = false;
    for (const NodeConfig& n : sc.nodes) {
      known |= rule.feed == n.temperature_feed || rule.feed == n.voltage_feed;
    }
    if (!known) fail("rules", "feed '" + rule.feed + "' is not produced by any node");
  }

  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("scenario", "cannot open file '" + path + "'");
  }
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw ConfigError("scenario", "file '" + path + "' is not valid JSON");
  }
  return parse_scenario(j);
}

}  // namespace wsn::sim
