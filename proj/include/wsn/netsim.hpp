#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wsn/feed_store.hpp"
#include "wsn/scenario.hpp"

namespace wsn::sim {

struct TraceEvent {
  double at = 0.0;
  std::string kind;
  std::string node;  // empty for coordinator/cloud events
};

// One converted sensor datum as buffered by the coordinator, with the raw
// sample it came from and the 2-decimal string that goes to the feed.
struct ReadingRecord {
  double t = 0.0;
  std::string node;
  std::string feed;
  int raw_adc = 0;
  double value = 0.0;
  std::string posted;
};

struct NodeReport {
  std::string addr64;
  double charge_remaining_mah = 0.0;
  double supply_volts = 0.0;
  bool latched = false;
  bool depleted = false;
  uint64_t frames_sent = 0;
  uint64_t polls_answered = 0;
};

struct CoordinatorReport {
  uint64_t polls_sent = 0;
  uint64_t poll_timeouts = 0;
  uint64_t readings_produced = 0;
  uint64_t corrupt_frames_detected = 0;
  uint64_t frames_dropped = 0;
  uint64_t stray_frames = 0;
  uint64_t posts_attempted = 0;
  uint64_t posts_succeeded = 0;
  uint64_t posts_failed = 0;
  uint64_t resets = 0;
  uint64_t lost_readings = 0;
  uint64_t cycles_skipped = 0;
  uint64_t max_outstanding_polls = 0;
  uint64_t buffered_at_end = 0;
};

struct SimReport {
  uint64_t seed = 0;
  double until_s = 0.0;
  CoordinatorReport coordinator;
  uint64_t entries_stored = 0;
  std::vector<NodeReport> nodes;
  std::vector<ReadingRecord> readings;
  std::vector<cloud::Notification> notifications;

  nlohmann::json to_json() const;
  std::string to_json_string() const;  // stable field order, trailing newline
};

// Runs the scenario on a virtual clock until until_s (inclusive). With no
// external service an in-process FeedStore is driven on the same clock.
// Identical (scenario, until) pairs produce byte-identical reports.
SimReport run_scenario(const Scenario& scenario, double until_s,
                       cloud::FeedService* service = nullptr,
                       std::vector<TraceEvent>* trace = nullptr);

// Columns: time,kind,node.
void write_trace_csv(std::ostream& out, const std::vector<TraceEvent>& trace);

}  // namespace wsn::sim
