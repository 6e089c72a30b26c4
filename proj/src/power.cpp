#include "wsn/power.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace wsn::power {

void validate(const PowerProfile& profile) {
  if (profile.i_onoff_ma <= 0 || profile.i_listen_ma <= 0 ||
      profile.i_trans_ma <= 0 || profile.i_sleep_ma <= 0) {
    throw std::domain_error("profile currents must be positive");
  }
  if (profile.i_sleep_ma >= profile.i_listen_ma ||
      profile.i_sleep_ma >= profile.i_trans_ma) {
    throw std::domain_error("sleep current must be below listen and transmit");
  }
  if (profile.capacity_mah <= 0) {
    throw std::domain_error("battery capacity must be positive");
  }
  if (profile.rail_full_v <= profile.rail_empty_v) {
    throw std::domain_error("rail_full_v must exceed rail_empty_v");
  }
}

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::sleep: return "sleep";
    case Mode::wake_transition: return "wake_transition";
    case Mode::listen: return "listen";
    case Mode::transmit: return "transmit";
    case Mode::depleted: return "depleted";
  }
  return "unknown";
}

BatteryState fresh_battery(const PowerProfile& profile) {
  return BatteryState{profile.capacity_mah, Mode::sleep};
}

void validate(const DutyCycleSpec& spec) {
  if (spec.payload_bytes < 2 || spec.payload_bytes > 102) {
    throw std::domain_error("payload_bytes must be in 2..102, got " +
                            std::to_string(spec.payload_bytes));
  }
  if (spec.update_period_s <= 0) {
    throw std::domain_error("update_period_s must be positive");
  }
  if (spec.t_onoff_s < 0 || spec.t_listen_s < 0) {
    throw std::domain_error("mode times must be non-negative");
  }
  if (spec.frame_overhead_bytes < 0) {
    throw std::domain_error("frame_overhead_bytes must be non-negative");
  }
  if (spec.bitrate_bps <= 0) {
    throw std::domain_error("bitrate_bps must be positive");
  }
}

double transmit_time(const DutyCycleSpec& spec) {
  validate(spec);
  return (spec.payload_bytes + spec.frame_overhead_bytes) * 8.0 /
         spec.bitrate_bps;
}

double average_current_ma(const PowerProfile& profile,
                          const DutyCycleSpec& spec) {
  validate(profile);
  double t_trans = transmit_time(spec);
  double active = spec.t_onoff_s + spec.t_listen_s + t_trans;
  if (active >= spec.update_period_s) {
    throw std::domain_error("active time exceeds the update period");
  }
  double t = spec.update_period_s;
  return (profile.i_onoff_ma * spec.t_onoff_s +
          profile.i_listen_ma * spec.t_listen_s +
          profile.i_trans_ma * t_trans +
          profile.i_sleep_ma * (t - active)) /
         t;
}

double lifetime_hours(const PowerProfile& profile, const DutyCycleSpec& spec) {
  return profile.capacity_mah / average_current_ma(profile, spec);
}

std::vector<SweepRow> lifetime_sweep(const PowerProfile& profile,
                                     const std::vector<int>& payloads,
                                     const std::vector<double>& periods,
                                     const DutyCycleSpec& timings) {
  if (payloads.empty() || periods.empty()) {
    throw std::domain_error("payload and period sets must be non-empty");
  }
  std::vector<SweepRow> rows;
  rows.reserve(payloads.size() * periods.size());
  for (int payload : payloads) {
    for (double period : periods) {
      DutyCycleSpec spec = timings;
      spec.payload_bytes = payload;
      spec.update_period_s = period;
      double avg = average_current_ma(profile, spec);
      rows.push_back({payload, period, avg, profile.capacity_mah / avg});
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const PowerProfile& profile,
                     const std::vector<SweepRow>& rows) {
  out << "payload_bytes,update_period_s,avg_current_ma,lifetime_hours\n";
  char line[128];
  for (const SweepRow& row : rows) {
    std::snprintf(line, sizeof line, "%d,%.10g,%.10g,%.10g\n",
                  row.payload_bytes, row.update_period_s, row.avg_current_ma,
                  row.lifetime_hours);
    out << line;
  }
  std::snprintf(line, sizeof line,
                "# sleep-current bound: capacity/i_sleep = %.2f h\n",
                profile.capacity_mah / profile.i_sleep_ma);
  out << line;
}

double current_ma(const PowerProfile& profile, Mode mode) {
  switch (mode) {
    case Mode::sleep: return profile.i_sleep_ma;
    case Mode::wake_transition: return profile.i_onoff_ma;
    case Mode::listen: return profile.i_listen_ma;
    case Mode::transmit: return profile.i_trans_ma;
    case Mode::depleted: return 0.0;
  }
  throw std::domain_error("unknown battery mode");
}

double rail_voltage(const PowerProfile& profile, const BatteryState& state) {
  double fraction = state.charge_mah / profile.capacity_mah;
  return profile.rail_empty_v +
         (profile.rail_full_v - profile.rail_empty_v) * fraction;
}

BatteryState drain(BatteryState state, const PowerProfile& profile, Mode mode,
                   double dt_s) {
  if (dt_s < 0) {
    throw std::domain_error("drain over negative time");
  }
  if (state.charge_mah <= 0 || state.mode == Mode::depleted) {
    return BatteryState{0.0, Mode::depleted};
  }
  double drawn = current_ma(profile, mode) * dt_s / 3600.0;
  double remaining = state.charge_mah - drawn;
  if (remaining <= 0) {
    return BatteryState{0.0, Mode::depleted};
  }
  return BatteryState{remaining, mode};
}

}  // namespace wsn::power
