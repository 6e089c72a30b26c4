#pragma once

#include <iosfwd>
#include <vector>

namespace wsn::power {

// Mode currents of one End Device plus its battery. Defaults are the
// measured values for the prototype node. rail_full_v/rail_empty_v describe
// the supply rail seen by the voltage divider, linear in state of charge.
struct PowerProfile {
  double i_onoff_ma = 8.1;
  double i_listen_ma = 40.0;
  double i_trans_ma = 38.0;
  double i_sleep_ma = 0.6;
  double capacity_mah = 2000.0;
  double nominal_voltage_v = 9.0;
  double rail_full_v = 3.3;
  double rail_empty_v = 2.0;
};

void validate(const PowerProfile& profile);  // throws std::domain_error

enum class Mode { sleep, wake_transition, listen, transmit, depleted };

const char* to_string(Mode mode);

struct BatteryState {
  double charge_mah = 0.0;
  Mode mode = Mode::sleep;

  bool operator==(const BatteryState&) const = default;
};

BatteryState fresh_battery(const PowerProfile& profile);

// One duty cycle: wake transition, listen window, one transmission, sleep
// for the rest of the update period.
struct DutyCycleSpec {
  double update_period_s = 1800.0;
  int payload_bytes = 2;  // 2..102, the MAC payload bounds
  double t_onoff_s = 0.010;
  double t_listen_s = 0.050;
  int frame_overhead_bytes = 26;
  double bitrate_bps = 250000.0;
};

void validate(const DutyCycleSpec& spec);  // throws std::domain_error

// (payload + overhead) * 8 / bitrate.
double transmit_time(const DutyCycleSpec& spec);

// Time-weighted mode currents over one update period.
double average_current_ma(const PowerProfile& profile, const DutyCycleSpec& spec);

// capacity / average current.
double lifetime_hours(const PowerProfile& profile, const DutyCycleSpec& spec);

struct SweepRow {
  int payload_bytes;
  double update_period_s;
  double avg_current_ma;
  double lifetime_hours;
};

std::vector<SweepRow> lifetime_sweep(const PowerProfile& profile,
                                     const std::vector<int>& payloads,
                                     const std::vector<double>& periods,
                                     const DutyCycleSpec& timings = {});

// Columns: payload_bytes,update_period_s,avg_current_ma,lifetime_hours.
// Appends a footer comment with the capacity/i_sleep bound.
void write_sweep_csv(std::ostream& out, const PowerProfile& profile,
                     const std::vector<SweepRow>& rows);

double current_ma(const PowerProfile& profile, Mode mode);

// Supply rail voltage for the current state of charge.
double rail_voltage(const PowerProfile& profile, const BatteryState& state);

// Integrates current over dt, floors charge at zero and flips the mode to
// depleted when the battery empties.
BatteryState drain(BatteryState state, const PowerProfile& profile, Mode mode,
                   double dt_s);

}  // namespace wsn::power
