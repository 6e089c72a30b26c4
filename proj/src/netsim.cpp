#include "wsn/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <memory>
#include <optional>
#include <ostream>
#include <queue>
#include <random>

#include "wsn/frame_codec.hpp"
#include "wsn/units.hpp"

namespace wsn::sim {

namespace {

std::string posted_string(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return buf;
}

enum class Ev {
  override_supply,
  node_wake,
  node_sleep,
  poll_start,
  poll_timeout,
  frame_to_node,
  frame_to_coord,
  timer_expiry,
};

struct Event {
  double at = 0.0;
  uint64_t seq = 0;
  Ev kind = Ev::node_wake;
  size_t node = 0;
  std::vector<uint8_t> bytes;
  uint64_t cycle_id = 0;
  size_t poll_index = 0;
  uint64_t timer_gen = 0;
  double supply_volts = 0.0;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.at != b.at) return a.at > b.at;
    return a.seq > b.seq;  // FIFO among simultaneous events
  }
};

Event make_event(double at, Ev kind, size_t node = 0) {
  Event e;
  e.at = at;
  e.kind = kind;
  e.node = node;
  return e;
}

struct Reading {
  std::string feed;
  std::string posted;
};

struct NodeState {
  NodeConfig cfg;
  power::PowerProfile profile;  // scenario profile with this node's capacity
  power::BatteryState battery;
  bool latched = false;
  bool depleted_reported = false;
  bool awake = false;
  double last_account = 0.0;
  uint64_t wake_index = 0;
  std::optional<double> forced_supply;
  std::deque<std::vector<uint8_t>> parent_queue;  // frames held while asleep
  uint64_t frames_sent = 0;
  uint64_t polls_answered = 0;

  bool alive() const {
    return !latched && battery.mode != power::Mode::depleted;
  }
  double cycle_len() const { return cfg.sleep_period_s + cfg.awake_window_s; }
  bool always_awake() const { return cfg.sleep_period_s == 0.0; }

  bool awake_by_schedule(double t) const {
    if (always_awake()) return true;
    double k = std::floor(t / cycle_len());
    return t - k * cycle_len() < cfg.awake_window_s;
  }

  // Earliest time at or after t that the parent can hand a frame over,
  // from the nominal wake schedule (dead nodes keep a schedule so the
  // coordinator's timeout stays finite).
  double dispatch_at(double t) const {
    if (awake_by_schedule(t)) return t;
    return (std::floor(t / cycle_len()) + 1.0) * cycle_len();
  }
};

class Kernel {
 public:
  Kernel(const Scenario& sc, cloud::FeedService& service,
         std::vector<TraceEvent>* trace)
      : sc_(sc),
        service_(service),
        trace_(trace),
        link_rng_(sc.seed ^ 0x9E3779B97F4A7C15ULL),
        env_rng_(sc.seed ^ 0xBF58476D1CE4E5B9ULL) {
    for (const NodeConfig& cfg : sc.nodes) {
      NodeState n;
      n.cfg = cfg;
      n.profile = sc.profile;
      n.profile.capacity_mah = cfg.battery_mah;
      double charge = cfg.initial_charge_mah < 0 ? cfg.battery_mah
                                                 : cfg.initial_charge_mah;
      n.battery = power::BatteryState{
          charge, charge > 0 ? power::Mode::sleep : power::Mode::depleted};
      n.latched = cfg.start_latched;
      nodes_.push_back(std::move(n));
    }
  }

  double now() const { return now_; }

  bool cloud_healthy() const {
    if (sc_.cloud.outage_from_s < 0) return true;
    return !(now_ >= sc_.cloud.outage_from_s && now_ < sc_.cloud.outage_to_s);
  }

  void setup(double until) {
    for (const OverrideConfig& ov : sc_.overrides) {
      Event e;
      e.at = ov.at_s;
      e.kind = Ev::override_supply;
      e.node = node_index(ov.node_addr64);
      e.supply_volts = ov.supply_volts;
      push(std::move(e));
    }
    for (size_t i = 0; i < nodes_.size(); ++i) {
      push(make_event(0.0, Ev::node_wake, i));
    }
    Event timer;
    timer.at = sc_.coordinator.update_period_s;
    timer.kind = Ev::timer_expiry;
    timer.timer_gen = timer_gen_;
    push(std::move(timer));
    if (!sc_.coordinator.autonomous) {
      push(make_event(0.0, Ev::poll_start));
    }
    until_ = until;
  }

  void run() {
    while (!queue_.empty() && queue_.top().at <= until_) {
      Event e = queue_.top();
      queue_.pop();
      now_ = e.at;
      dispatch(e);
    }
    now_ = until_;
    for (NodeState& n : nodes_) settle(n);
  }

  SimReport report() {
    SimReport rep;
    rep.seed = sc_.seed;
    rep.until_s = until_;
    rep.coordinator = coord_report_;
    rep.coordinator.buffered_at_end = buffer_.size();
    rep.entries_stored = service_.entry_count();
    rep.notifications = service_.notifications();
    rep.readings = readings_;
    for (NodeState& n : nodes_) {
      NodeReport nr;
      nr.addr64 = addr64_hex(n.cfg.addr64);
      nr.charge_remaining_mah = n.battery.charge_mah;
      nr.supply_volts = supply_volts(n);
      nr.latched = n.latched;
      nr.depleted = n.battery.mode == power::Mode::depleted;
      nr.frames_sent = n.frames_sent;
      nr.polls_answered = n.polls_answered;
      rep.nodes.push_back(std::move(nr));
    }
    return rep;
  }

 private:
  size_t node_index(uint64_t addr64) const {
    for (size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].cfg.addr64 == addr64) return i;
    }
    throw ConfigError("overrides", "unknown node address");
  }

  void push(Event e) {
    e.seq = next_seq_++;
    queue_.push(std::move(e));
  }

  void trace(const std::string& kind, const std::string& node = {}) {
    if (trace_ != nullptr) trace_->push_back(TraceEvent{now_, kind, node});
  }

  void trace(const std::string& kind, const NodeState& n) {
    trace(kind, addr64_hex(n.cfg.addr64));
  }

  double latency_s() const { return sc_.link.latency_ms / 1000.0; }

  double supply_volts(const NodeState& n) const {
    if (n.forced_supply) return *n.forced_supply;
    return power::rail_voltage(n.profile, n.battery);
  }

  // Battery integration up to a point in time, in the node's current mode.
  void account(NodeState& n, double until_time) {
    power::Mode mode = n.awake ? power::Mode::listen : power::Mode::sleep;
    if (until_time > n.last_account && n.battery.mode != power::Mode::depleted) {
      n.battery = power::drain(n.battery, n.profile, mode,
                               until_time - n.last_account);
    }
    n.last_account = std::max(n.last_account, until_time);
    note_depletion(n);
  }

  // Instantaneous energy charge; virtual time does not advance.
  void burst(NodeState& n, power::Mode mode, double duration_s) {
    if (n.battery.mode != power::Mode::depleted) {
      n.battery = power::drain(n.battery, n.profile, mode, duration_s);
      if (n.battery.mode != power::Mode::depleted) {
        n.battery.mode = n.awake ? power::Mode::listen : power::Mode::sleep;
      }
    }
    note_depletion(n);
  }

  void note_depletion(NodeState& n) {
    if (n.battery.mode == power::Mode::depleted && !n.depleted_reported) {
      n.depleted_reported = true;
      n.awake = false;
      trace("node_depleted", n);
    }
  }

  void settle(NodeState& n) { account(n, until_); }

  void dispatch(const Event& e) {
    switch (e.kind) {
      case Ev::override_supply: {
        NodeState& n = nodes_[e.node];
        n.forced_supply = e.supply_volts;
        trace("override", n);
        break;
      }
      case Ev::node_wake: on_node_wake(e.node); break;
      case Ev::node_sleep: on_node_sleep(e.node); break;
      case Ev::poll_start: on_poll_start(); break;
      case Ev::poll_timeout: on_poll_timeout(e); break;
      case Ev::frame_to_node: on_frame_to_node(e); break;
      case Ev::frame_to_coord: on_frame_to_coord(e); break;
      case Ev::timer_expiry: on_timer_expiry(e); break;
    }
  }

  void on_node_wake(size_t idx) {
    NodeState& n = nodes_[idx];
    if (!n.alive()) return;
    account(n, now_);
    if (!n.alive()) return;
    burst(n, power::Mode::wake_transition, sc_.timing.t_onoff_s);
    if (!n.alive()) return;
    n.awake = true;
    trace("node_wake", n);
    if (sc_.coordinator.autonomous) sample_and_send(n);
    while (n.alive() && !n.parent_queue.empty()) {
      std::vector<uint8_t> frame = std::move(n.parent_queue.front());
      n.parent_queue.pop_front();
      handle_poll_frame(n, frame);
    }
    if (!n.always_awake() && n.alive()) {
      push(make_event(n.wake_index * n.cycle_len() + n.cfg.awake_window_s,
                      Ev::node_sleep, idx));
    }
  }

  void on_node_sleep(size_t idx) {
    NodeState& n = nodes_[idx];
    if (!n.alive() || !n.awake) return;
    account(n, now_);
    n.awake = false;
    if (!n.alive()) return;
    trace("node_sleep", n);
    n.wake_index += 1;
    push(make_event(n.wake_index * n.cycle_len(), Ev::node_wake, idx));
  }

  void on_frame_to_node(const Event& e) {
    NodeState& n = nodes_[e.node];
    if (!n.alive()) {
      trace("frame_queued", n);  // parent keeps it; the node never collects
      return;
    }
    if (!n.awake) {
      n.parent_queue.push_back(e.bytes);
      trace("frame_queued", n);
      return;
    }
    handle_poll_frame(n, e.bytes);
  }

  void handle_poll_frame(NodeState& n, const std::vector<uint8_t>& bytes) {
    try {
      frame::ApiFrame f = frame::decode_frame(bytes, sc_.link.escaped);
      frame::parse_poll_request(f.frame_data);
    } catch (const frame::FrameError&) {
      coord_report_.corrupt_frames_detected += 1;
      trace("frame_corrupt_detected", n);
      return;  // no response; the coordinator times out
    }
    n.polls_answered += 1;
    sample_and_send(n);
  }

  void sample_and_send(NodeState& n) {
    if (!n.alive()) return;
    account(n, now_);
    if (!n.alive()) return;

    double supply = supply_volts(n);
    double temp = std::clamp(sc_.environment.temperature_at(now_), 0.0,
                             units::kTempFullScaleC);
    int adc_temp = units::celsius_to_adc(temp).raw;
    if (sc_.environment.adc_jitter_lsb > 0) {
      int j = sc_.environment.adc_jitter_lsb;
      adc_temp += std::uniform_int_distribution<int>(-j, j)(env_rng_);
      adc_temp = std::clamp(adc_temp, 0, units::kAdcFullScale);
    }
    int adc_supply =
        units::supply_volts_to_adc(std::clamp(supply, 0.0, units::kSupplyFullScaleV))
            .raw;

    frame::IoSample sample;
    sample.source_addr64 = n.cfg.addr64;
    sample.analog_mask = 0b11;  // AD0 temperature, AD1 supply voltage
    sample.analog_values = {static_cast<uint16_t>(adc_temp),
                            static_cast<uint16_t>(adc_supply)};
    frame::ApiFrame f{frame::serialize_io_sample(sample)};

    power::DutyCycleSpec tx = sc_.timing;
    tx.payload_bytes = static_cast<int>(f.frame_data.size());
    burst(n, power::Mode::transmit, power::transmit_time(tx));
    if (n.battery.mode == power::Mode::depleted) return;

    n.frames_sent += 1;
    deliver_to_coordinator(f);

    // Transmit the low reading once, then the node sleeps for good.
    if (supply < sc_.latch_threshold_v) {
      n.latched = true;
      n.awake = false;
      trace("node_latched", n);
    }
  }

  void deliver_to_coordinator(const frame::ApiFrame& f) {
    std::vector<uint8_t> wire = transmit(f);
    if (wire.empty()) return;  // dropped
    Event e;
    e.at = now_ + latency_s();
    e.kind = Ev::frame_to_coord;
    e.bytes = std::move(wire);
    push(std::move(e));
  }

  // Applies drop and corruption faults. Corruption flips one payload byte
  // and leaves the original checksum on the wire, so Eq.-style detection is
  // guaranteed at the receiver.
  std::vector<uint8_t> transmit(const frame::ApiFrame& f) {
    if (sc_.link.drop_prob > 0 &&
        std::uniform_real_distribution<double>(0.0, 1.0)(link_rng_) <
            sc_.link.drop_prob) {
      coord_report_.frames_dropped += 1;
      trace("frame_dropped");
      return {};
    }
    if (sc_.link.corrupt_prob > 0 &&
        std::uniform_real_distribution<double>(0.0, 1.0)(link_rng_) <
            sc_.link.corrupt_prob) {
      std::vector<uint8_t> data = f.frame_data;
      size_t idx = std::uniform_int_distribution<size_t>(0, data.size() - 1)(link_rng_);
      uint8_t flip = static_cast<uint8_t>(
          std::uniform_int_distribution<int>(1, 255)(link_rng_));
      uint8_t original_checksum = f.checksum();
      data[idx] ^= flip;
      return frame::encode_frame_raw(data, original_checksum, sc_.link.escaped);
    }
    return frame::encode_frame(f, sc_.link.escaped);
  }

  void on_poll_start() {
    push(make_event(now_ + poll_period_s(), Ev::poll_start));
    if (connected_ == false) {
      coord_report_.cycles_skipped += 1;
      return;
    }
    if (cycle_active_) {
      coord_report_.cycles_skipped += 1;
      return;
    }
    cycle_id_ += 1;
    poll_index_ = 0;
    cycle_active_ = true;
    send_poll();
  }

  double poll_period_s() const {
    return sc_.coordinator.poll_period_s > 0 ? sc_.coordinator.poll_period_s
                                             : sc_.coordinator.update_period_s;
  }

  void send_poll() {
    NodeState& n = nodes_[poll_index_];
    frame::PollRequest req;
    req.dest_addr64 = n.cfg.addr64;
    req.frame_id = next_frame_id_;
    next_frame_id_ = next_frame_id_ == 255 ? 1 : next_frame_id_ + 1;
    frame::ApiFrame f = frame::build_poll_request(req);

    coord_report_.polls_sent += 1;
    outstanding_ += 1;
    coord_report_.max_outstanding_polls =
        std::max(coord_report_.max_outstanding_polls, outstanding_);
    trace("poll", n);

    double arrival = now_ + latency_s();
    double dispatch = n.dispatch_at(arrival);
    std::vector<uint8_t> wire = transmit(f);
    if (!wire.empty()) {
      Event deliver;
      deliver.at = dispatch;
      deliver.kind = Ev::frame_to_node;
      deliver.node = poll_index_;
      deliver.bytes = std::move(wire);
      push(std::move(deliver));
    }
    Event timeout;
    timeout.at = dispatch + latency_s() + sc_.coordinator.poll_timeout_ms / 1000.0;
    timeout.kind = Ev::poll_timeout;
    timeout.node = poll_index_;
    timeout.cycle_id = cycle_id_;
    timeout.poll_index = poll_index_;
    push(std::move(timeout));
  }

  void on_poll_timeout(const Event& e) {
    if (!cycle_active_ || e.cycle_id != cycle_id_ || e.poll_index != poll_index_) {
      return;  // stale: the response arrived first
    }
    coord_report_.poll_timeouts += 1;
    outstanding_ -= 1;
    trace("poll_timeout", nodes_[e.node]);
    advance_cycle();
  }

  void advance_cycle() {
    poll_index_ += 1;
    if (poll_index_ < nodes_.size()) {
      send_poll();
      return;
    }
    cycle_active_ = false;
    if (sc_.coordinator.flush_on_poll_complete) flush();
  }

  void on_frame_to_coord(const Event& e) {
    frame::IoSample sample;
    try {
      frame::ApiFrame f = frame::decode_frame(e.bytes, sc_.link.escaped);
      sample = frame::parse_io_sample(f.frame_data);
    } catch (const frame::FrameError&) {
      coord_report_.corrupt_frames_detected += 1;
      trace("frame_corrupt_detected");
      return;  // never becomes a reading; a pending poll times out
    }
    trace("frame_delivery", addr64_hex(sample.source_addr64));

    if (!sc_.coordinator.autonomous) {
      if (!cycle_active_ || sample.source_addr64 != nodes_[poll_index_].cfg.addr64) {
        coord_report_.stray_frames += 1;
        return;
      }
    }
    size_t idx = 0;
    while (idx < nodes_.size() && nodes_[idx].cfg.addr64 != sample.source_addr64) {
      ++idx;
    }
    if (idx == nodes_.size() || sample.analog_values.size() != 2) {
      coord_report_.stray_frames += 1;
      return;
    }
    buffer_reading(nodes_[idx], sample);
    if (!sc_.coordinator.autonomous) {
      outstanding_ -= 1;
      advance_cycle();
    }
  }

  void buffer_reading(const NodeState& n, const frame::IoSample& sample) {
    int raw_temp = sample.analog_values[0];
    int raw_supply = sample.analog_values[1];
    double celsius = units::millivolts_to_celsius(
        units::adc_to_millivolts(units::AdcReading(raw_temp)));
    double volts = units::adc_to_supply_volts(units::AdcReading(raw_supply));

    std::string node_hex = addr64_hex(n.cfg.addr64);
    readings_.push_back(ReadingRecord{now_, node_hex, n.cfg.temperature_feed,
                                      raw_temp, celsius, posted_string(celsius)});
    buffer_.push_back(Reading{n.cfg.temperature_feed, posted_string(celsius)});
    readings_.push_back(ReadingRecord{now_, node_hex, n.cfg.voltage_feed,
                                      raw_supply, volts, posted_string(volts)});
    buffer_.push_back(Reading{n.cfg.voltage_feed, posted_string(volts)});
    coord_report_.readings_produced += 2;
  }

  void on_timer_expiry(const Event& e) {
    if (e.timer_gen != timer_gen_) return;  // canceled by a reset
    trace("timer_expiry");
    Event next;
    next.at = now_ + sc_.coordinator.update_period_s;
    next.kind = Ev::timer_expiry;
    next.timer_gen = timer_gen_;
    push(std::move(next));
    flush();
  }

  void flush() {
    if (!connected_) {
      connected_ = cloud_healthy();
      if (!connected_) return;
      trace("reconnected");
    }
    while (!buffer_.empty()) {
      const Reading& r = buffer_.front();
      coord_report_.posts_attempted += 1;
      bool ok = service_.post_event(sc_.api_key, r.feed, r.posted);
      if (ok) {
        coord_report_.posts_succeeded += 1;
        trace("post_complete");
        buffer_.pop_front();
        consecutive_failures_ = 0;
        continue;
      }
      coord_report_.posts_failed += 1;
      consecutive_failures_ += 1;
      trace("post_failed");
      if (consecutive_failures_ >= sc_.coordinator.failure_reset_threshold) {
        reset_coordinator();
      }
      break;  // leave the rest buffered for the next expiry
    }
  }

  // Drops the buffer, cycles the connection and restarts the report timer,
  // mirroring the watchdog reset of the base station.
  void reset_coordinator() {
    coord_report_.resets += 1;
    coord_report_.lost_readings += buffer_.size();
    buffer_.clear();
    consecutive_failures_ = 0;
    if (cycle_active_) {
      cycle_active_ = false;
      outstanding_ = 0;
    }
    connected_ = false;
    trace("reset");
    connected_ = cloud_healthy();
    timer_gen_ += 1;
    Event next;
    next.at = now_ + sc_.coordinator.update_period_s;
    next.kind = Ev::timer_expiry;
    next.timer_gen = timer_gen_;
    push(std::move(next));
  }

  const Scenario& sc_;
  cloud::FeedService& service_;
  std::vector<TraceEvent>* trace_;
  std::mt19937_64 link_rng_;
  std::mt19937_64 env_rng_;
  std::vector<NodeState> nodes_;
  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  uint64_t next_seq_ = 0;
  double now_ = 0.0;
  double until_ = 0.0;

  // coordinator state
  bool connected_ = true;
  bool cycle_active_ = false;
  uint64_t cycle_id_ = 0;
  size_t poll_index_ = 0;
  uint8_t next_frame_id_ = 1;
  uint64_t outstanding_ = 0;
  int consecutive_failures_ = 0;
  uint64_t timer_gen_ = 0;
  std::deque<Reading> buffer_;
  std::vector<ReadingRecord> readings_;
  CoordinatorReport coord_report_;
};

}  // namespace

SimReport run_scenario(const Scenario& scenario, double until_s,
                       cloud::FeedService* service,
                       std::vector<TraceEvent>* trace) {
  if (until_s < 0) {
    throw ConfigError("until", "must be >= 0");
  }
  Scenario sc = scenario;
  for (size_t i = 0; i < sc.nodes.size(); ++i) {
    std::string index = std::to_string(i + 1);
    if (sc.nodes[i].temperature_feed.empty()) {
      sc.nodes[i].temperature_feed = "indoor-temperature-" + index;
    }
    if (sc.nodes[i].voltage_feed.empty()) {
      sc.nodes[i].voltage_feed = "node-voltage-" + index;
    }
  }
  std::unique_ptr<cloud::FeedStore> store;
  std::unique_ptr<cloud::LocalFeedService> local;
  Kernel* kernel_ptr = nullptr;  // set before any clock/health callback fires

  cloud::FeedService* svc = service;
  if (svc == nullptr) {
    store = std::make_unique<cloud::FeedStore>(
        [&kernel_ptr]() { return kernel_ptr != nullptr ? kernel_ptr->now() : 0.0; },
        cloud::LatencyDistribution::parse(sc.cloud.latency), sc.seed);
    store->register_key(sc.api_key, "simulator");
    local = std::make_unique<cloud::LocalFeedService>(*store, [&kernel_ptr]() {
      return kernel_ptr == nullptr || kernel_ptr->cloud_healthy();
    });
    svc = local.get();
  }

  Kernel kernel(sc, *svc, trace);
  kernel_ptr = &kernel;

  for (const NodeConfig& n : sc.nodes) {
    svc->create_feed(sc.api_key, n.temperature_feed);
    svc->create_feed(sc.api_key, n.voltage_feed);
  }
  for (const RuleConfig& r : sc.rules) {
    svc->add_rule(sc.api_key, r.feed, r.comparison, r.threshold, r.channel);
  }

  kernel.setup(until_s);
  kernel.run();
  return kernel.report();
}

nlohmann::json SimReport::to_json() const {
  nlohmann::json coord{
      {"polls_sent", coordinator.polls_sent},
      {"poll_timeouts", coordinator.poll_timeouts},
      {"readings_produced", coordinator.readings_produced},
      {"corrupt_frames_detected", coordinator.corrupt_frames_detected},
      {"frames_dropped", coordinator.frames_dropped},
      {"stray_frames", coordinator.stray_frames},
      {"posts_attempted", coordinator.posts_attempted},
      {"posts_succeeded", coordinator.posts_succeeded},
      {"posts_failed", coordinator.posts_failed},
      {"resets", coordinator.resets},
      {"lost_readings", coordinator.lost_readings},
      {"cycles_skipped", coordinator.cycles_skipped},
      {"max_outstanding_polls", coordinator.max_outstanding_polls},
      {"buffered_at_end", coordinator.buffered_at_end},
  };
  nlohmann::json nodes_arr = nlohmann::json::array();
  for (const NodeReport& n : nodes) {
    nodes_arr.push_back(nlohmann::json{
        {"addr64", n.addr64},
        {"charge_remaining_mah", n.charge_remaining_mah},
        {"supply_volts", n.supply_volts},
        {"latched", n.latched},
        {"depleted", n.depleted},
        {"frames_sent", n.frames_sent},
        {"polls_answered", n.polls_answered},
    });
  }
  nlohmann::json readings_arr = nlohmann::json::array();
  for (const ReadingRecord& r : readings) {
    readings_arr.push_back(nlohmann::json{
        {"t", r.t},
        {"node", r.node},
        {"feed", r.feed},
        {"raw_adc", r.raw_adc},
        {"value", r.value},
        {"posted", r.posted},
    });
  }
  nlohmann::json notes = nlohmann::json::array();
  for (const cloud::Notification& n : notifications) {
    notes.push_back(cloud::notification_json(n));
  }
  return nlohmann::json{
      {"seed", seed},
      {"until_s", until_s},
      {"coordinator", std::move(coord)},
      {"cloud",
       nlohmann::json{{"entries_stored", entries_stored},
                      {"notifications", std::move(notes)}}},
      {"nodes", std::move(nodes_arr)},
      {"readings", std::move(readings_arr)},
  };
}

std::string SimReport::to_json_string() const { return to_json().dump(2) + "\n"; }

void write_trace_csv(std::ostream& out, const std::vector<TraceEvent>& trace) {
  out << "time,kind,node\n";
  char line[160];
  for (const TraceEvent& e : trace) {
    std::snprintf(line, sizeof line, "%.6f,%s,%s\n", e.at, e.kind.c_str(),
                  e.node.c_str());
    out << line;
  }
}

}  // namespace wsn::sim
