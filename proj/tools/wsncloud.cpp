#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "wsn/alert_drill.hpp"
#include "wsn/frame_codec.hpp"
#include "wsn/http_service.hpp"
#include "wsn/netsim.hpp"
#include "wsn/power.hpp"
#include "wsn/units.hpp"

namespace {

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop.store(true); }

double wall_seconds() {
  using namespace std::chrono;
  return duration<double>(system_clock::now().time_since_epoch()).count();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::string env_key_or(const std::string& fallback) {
  const char* env = std::getenv("SENSE_KEY");
  return env != nullptr && *env != '\0' ? env : fallback;
}

wsn::power::PowerProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile '" + path + "'");
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw std::runtime_error("profile '" + path + "' is not a JSON object");
  }
  wsn::power::PowerProfile p;
  p.i_onoff_ma = j.value("i_onoff_ma", p.i_onoff_ma);
  p.i_listen_ma = j.value("i_listen_ma", p.i_listen_ma);
  p.i_trans_ma = j.value("i_trans_ma", p.i_trans_ma);
  p.i_sleep_ma = j.value("i_sleep_ma", p.i_sleep_ma);
  p.capacity_mah = j.value("capacity_mAh", p.capacity_mah);
  p.nominal_voltage_v = j.value("nominal_voltage_v", p.nominal_voltage_v);
  p.rail_full_v = j.value("rail_full_v", p.rail_full_v);
  p.rail_empty_v = j.value("rail_empty_v", p.rail_empty_v);
  validate(p);
  return p;
}

int run_simulate(const std::string& scenario_path, double until, int64_t seed,
                 const std::string& report_path, const std::string& trace_path,
                 const std::string& cloud_url, const std::string& key_flag) {
  wsn::sim::Scenario sc = wsn::sim::load_scenario(scenario_path);
  if (seed >= 0) sc.seed = static_cast<uint64_t>(seed);
  sc.api_key = key_flag.empty() ? env_key_or(sc.api_key) : key_flag;

  std::unique_ptr<wsn::cloud::RemoteFeedService> remote;
  wsn::cloud::FeedService* svc = nullptr;
  if (!cloud_url.empty()) {
    remote = std::make_unique<wsn::cloud::RemoteFeedService>(cloud_url);
    svc = remote.get();
  }

  std::vector<wsn::sim::TraceEvent> trace;
  wsn::sim::SimReport report = wsn::sim::run_scenario(
      sc, until, svc, trace_path.empty() ? nullptr : &trace);

  std::string json = report.to_json_string();
  if (report_path.empty()) {
    std::cout << json;
  } else {
    write_text(report_path, json);
  }
  if (!trace_path.empty()) {
    std::ostringstream csv;
    wsn::sim::write_trace_csv(csv, trace);
    write_text(trace_path, csv.str());
  }
  return 0;
}

int run_serve(const std::string& host, int port, std::vector<std::string> keys,
              const std::string& latency, uint64_t seed,
              const std::string& snapshot_path) {
  wsn::cloud::FeedStore store(wall_seconds,
                              wsn::cloud::LatencyDistribution::parse(latency),
                              seed);
  if (keys.empty()) keys.push_back(env_key_or("demo-key"));
  for (const std::string& key : keys) store.register_key(key, "serve");

  wsn::cloud::HttpService service(store);
  int bound = service.listen_on(host, port);
  std::fprintf(stderr, "serving on http://%s:%d (keys: %zu)\n", host.c_str(),
               bound, keys.size());

  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  while (!g_stop.load()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  service.stop();
  if (!snapshot_path.empty()) {
    write_text(snapshot_path, store.snapshot().dump(2) + "\n");
    std::fprintf(stderr, "snapshot written to %s\n", snapshot_path.c_str());
  }
  return 0;
}

int run_frame_encode(const std::string& hex, bool escaped) {
  wsn::frame::ApiFrame frame{wsn::frame::from_hex(hex)};
  std::cout << wsn::frame::to_hex(wsn::frame::encode_frame(frame, escaped))
            << "\n";
  return 0;
}

int run_frame_decode(const std::string& hex, bool escaped) {
  std::vector<uint8_t> wire = wsn::frame::from_hex(hex);
  wsn::frame::ApiFrame frame = wsn::frame::decode_frame(wire, escaped);
  std::printf("frame_data=%s\n", wsn::frame::to_hex(frame.frame_data).c_str());
  std::printf("length=%u\n", frame.length());
  std::printf("checksum=%02X ok\n", frame.checksum());
  if (frame.type() == wsn::frame::kIoSampleFrameType) {
    wsn::frame::IoSample s = wsn::frame::parse_io_sample(frame.frame_data);
    std::printf("type=io-sample\n");
    std::printf("source_addr64=%s\n", wsn::sim::addr64_hex(s.source_addr64).c_str());
    int index = 0;
    for (int bit = 0; bit < 8; ++bit) {
      if (s.analog_mask & (1u << bit)) {
        std::printf("AD%d=%u\n", bit, s.analog_values[index++]);
      }
    }
  } else if (frame.type() == wsn::frame::kRemoteCommandFrameType) {
    wsn::frame::PollRequest req = wsn::frame::parse_poll_request(frame.frame_data);
    std::printf("type=poll\n");
    std::printf("dest_addr64=%s\n", wsn::sim::addr64_hex(req.dest_addr64).c_str());
    std::printf("frame_id=%u\n", req.frame_id);
  }
  return 0;
}

int run_convert(const std::string& kind, const std::vector<double>& values) {
  using namespace wsn::units;
  auto need = [&](size_t n) {
    if (values.size() != n) {
      throw std::domain_error("conversion '" + kind + "' takes " +
                              std::to_string(n) + " value(s)");
    }
  };
  double out = 0.0;
  if (kind == "adc-mv") {
    need(1);
    out = adc_to_millivolts(AdcReading(static_cast<int>(values[0])));
  } else if (kind == "mv-c") {
    need(1);
    out = millivolts_to_celsius(values[0]);
  } else if (kind == "adc-c") {
    need(1);
    out = millivolts_to_celsius(
        adc_to_millivolts(AdcReading(static_cast<int>(values[0]))));
  } else if (kind == "adc-v") {
    need(1);
    out = adc_to_supply_volts(AdcReading(static_cast<int>(values[0])));
  } else if (kind == "v-adc") {
    need(1);
    out = supply_volts_to_adc(values[0]).raw;
  } else if (kind == "c-adc") {
    need(1);
    out = celsius_to_adc(values[0]).raw;
  } else if (kind == "divider") {
    need(3);
    out = divider_output({values[1], values[2], values[0]});  // vin r1 r2
  } else {
    throw std::domain_error("unknown conversion '" + kind + "'");
  }
  std::printf("%.10g\n", out);
  return 0;
}

int run_lifetime(const std::string& profile_path, std::vector<int> payloads,
                 std::vector<double> periods, const std::string& out_path) {
  wsn::power::PowerProfile profile =
      profile_path.empty() ? wsn::power::PowerProfile{} : load_profile(profile_path);
  auto rows = wsn::power::lifetime_sweep(profile, payloads, periods);
  std::ostringstream csv;
  wsn::power::write_sweep_csv(csv, profile, rows);
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    write_text(out_path, csv.str());
  }
  return 0;
}

int run_alert_drill(int trials, const std::string& latency, uint64_t seed,
                    const std::string& out_path) {
  wsn::cloud::DrillResult result = wsn::cloud::run_alert_drill(
      trials, wsn::cloud::LatencyDistribution::parse(latency), seed);
  std::string csv = wsn::cloud::drill_csv(result);
  std::cout << csv;
  if (!out_path.empty()) write_text(out_path, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WSN-to-cloud testbed: simulator, mock feed service and tools"};
  app.require_subcommand(1);

  // simulate
  std::string scenario_path, report_path, trace_path, cloud_url, key_flag;
  double until = 0.0;
  int64_t seed_override = -1;
  CLI::App* simulate = app.add_subcommand("simulate", "run a scenario");
  simulate->add_option("--scenario", scenario_path, "scenario JSON file")
      ->required();
  simulate->add_option("--until", until, "virtual seconds to run")->required();
  simulate->add_option("--seed", seed_override, "override the scenario seed");
  simulate->add_option("--report", report_path, "write the report JSON here");
  simulate->add_option("--trace", trace_path, "write the event trace CSV here");
  simulate->add_option("--cloud", cloud_url,
                       "post to a remote service instead of in-process");
  simulate->add_option("--key", key_flag, "API key (overrides SENSE_KEY)");

  // serve
  std::string host = "127.0.0.1";
  int port = 8423;
  std::vector<std::string> keys;
  std::string serve_latency = "uniform:8:13";
  uint64_t serve_seed = 1;
  std::string snapshot_path;
  CLI::App* serve = app.add_subcommand("serve", "run the mock feed service");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port (0 picks one)");
  serve->add_option("--key", keys, "registered API key (repeatable)");
  serve->add_option("--latency", serve_latency, "notification latency model");
  serve->add_option("--seed", serve_seed, "latency RNG seed");
  serve->add_option("--snapshot", snapshot_path, "JSON snapshot on shutdown");

  // frame
  bool escaped = true;
  std::string encode_hex, decode_hex;
  CLI::App* frame = app.add_subcommand("frame", "API frame tools");
  frame->require_subcommand(1);
  CLI::App* encode = frame->add_subcommand("encode", "frame data hex -> wire hex");
  encode->add_option("hex", encode_hex, "frame data bytes in hex")->required();
  encode->add_flag("--escaped,!--unescaped", escaped, "escaped mode (default)");
  CLI::App* decode = frame->add_subcommand("decode", "wire hex -> field breakdown");
  decode->add_option("hex", decode_hex, "wire bytes in hex")->required();
  decode->add_flag("--escaped,!--unescaped", escaped, "escaped mode (default)");

  // convert
  std::string convert_kind;
  std::vector<double> convert_values;
  CLI::App* convert = app.add_subcommand("convert", "engineering unit conversions");
  convert
      ->add_option("kind", convert_kind,
                   "adc-mv | mv-c | adc-c | adc-v | v-adc | c-adc | divider")
      ->required();
  convert->add_option("values", convert_values, "input value(s)")->required();

  // lifetime
  std::string profile_path, lifetime_out;
  std::vector<int> payloads = {2, 22, 42, 62, 82, 102};
  std::vector<double> periods = {60, 300, 1800, 7200, 28800, 86400};
  CLI::App* lifetime = app.add_subcommand("lifetime", "battery lifetime sweep");
  lifetime->add_option("--profile", profile_path, "power profile JSON");
  lifetime->add_option("--payloads", payloads, "payload sizes in bytes")
      ->delimiter(',');
  lifetime->add_option("--periods", periods, "update periods in seconds")
      ->delimiter(',');
  lifetime->add_option("--out", lifetime_out, "write the CSV here");

  // alert-drill
  int trials = 10;
  std::string drill_latency = "uniform:8:13";
  uint64_t drill_seed = 1;
  std::string drill_out;
  CLI::App* drill = app.add_subcommand("alert-drill",
                                       "measure alert delivery latency");
  drill->add_option("--trials", trials, "number of trials")
      ->check(CLI::PositiveNumber);
  drill->add_option("--latency", drill_latency, "delivery latency model");
  drill->add_option("--seed", drill_seed, "per-run RNG seed");
  drill->add_option("--out", drill_out, "write the CSV here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      return run_simulate(scenario_path, until, seed_override, report_path,
                          trace_path, cloud_url, key_flag);
    }
    if (serve->parsed()) {
      return run_serve(host, port, keys, serve_latency, serve_seed, snapshot_path);
    }
    if (encode->parsed()) return run_frame_encode(encode_hex, escaped);
    if (decode->parsed()) return run_frame_decode(decode_hex, escaped);
    if (convert->parsed()) return run_convert(convert_kind, convert_values);
    if (lifetime->parsed()) {
      return run_lifetime(profile_path, payloads, periods, lifetime_out);
    }
    if (drill->parsed()) {
      return run_alert_drill(trials, drill_latency, drill_seed, drill_out);
    }
  } catch (const wsn::sim::ConfigError& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return 2;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "%s\n", err.what());
    return 1;
  }
  return 0;
}
