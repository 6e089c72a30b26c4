#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wsn/feed_store.hpp"

namespace wsn::cloud {

struct DrillResult {
  std::vector<double> latencies_s;  // one per trial
  double mean_s = 0.0;
};

// Repeats the low-voltage alert measurement: each trial pins one node's
// supply at 2.1 V mid-run and records the gap from that instant to the
// notification's delivery time. Trials run on independent simulations with
// per-trial seeds.
DrillResult run_alert_drill(int trials, const LatencyDistribution& latency,
                            uint64_t seed);

// Columns: trial,latency_s, with a mean footer comment.
std::string drill_csv(const DrillResult& result);

}  // namespace wsn::cloud
