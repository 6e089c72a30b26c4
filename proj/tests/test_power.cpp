#include "wsn/power.hpp"

#include <random>
#include <sstream>

#include "doctest.h"

using namespace wsn::power;

namespace {

DutyCycleSpec spec_with(int payload, double period) {
  DutyCycleSpec s;
  s.payload_bytes = payload;
  s.update_period_s = period;
  return s;
}

}  // namespace

TEST_CASE("transmit time") {
  CHECK(transmit_time(spec_with(2, 1800)) == doctest::Approx(0.000896).epsilon(1e-12));
  CHECK(transmit_time(spec_with(102, 1800)) == doctest::Approx(0.004096).epsilon(1e-12));
  DutyCycleSpec bare = spec_with(2, 1800);
  bare.frame_overhead_bytes = 0;
  CHECK(transmit_time(bare) == doctest::Approx(0.000064).epsilon(1e-12));
  CHECK_THROWS_AS(transmit_time(spec_with(1, 1800)), std::domain_error);
  CHECK_THROWS_AS(transmit_time(spec_with(103, 1800)), std::domain_error);
}

TEST_CASE("average current over one update period") {
  PowerProfile table1;
  // 8.1*0.01 + 40*0.05 + 38*0.000896 + 0.6*(1800-0.060896), over 1800 s
  CHECK(average_current_ma(table1, spec_with(2, 1800)) ==
        doctest::Approx(0.601154728).epsilon(1e-12));

  SUBCASE("long periods approach the sleep floor") {
    CHECK(average_current_ma(table1, spec_with(2, 1e8)) ==
          doctest::Approx(0.6).epsilon(1e-6));
  }

  SUBCASE("zero active time is exactly the sleep current") {
    DutyCycleSpec idle = spec_with(2, 1800);
    idle.t_onoff_s = 0;
    idle.t_listen_s = 0;
    idle.frame_overhead_bytes = 0;
    idle.bitrate_bps = 1e300;  // transmit time underflows to nothing
    CHECK(average_current_ma(table1, idle) == 0.6);
  }

  SUBCASE("active time must fit in the period") {
    DutyCycleSpec tight = spec_with(2, 0.05);
    CHECK_THROWS_AS(average_current_ma(table1, tight), std::domain_error);
  }
}

TEST_CASE("lifetime") {
  PowerProfile table1;
  CHECK(table1.capacity_mah / table1.i_sleep_ma ==
        doctest::Approx(3333.3333333).epsilon(1e-9));
  CHECK(lifetime_hours(table1, spec_with(2, 1800)) ==
        doctest::Approx(3326.9305003286945).epsilon(1e-9));

  SUBCASE("doubling capacity doubles lifetime") {
    PowerProfile big = table1;
    big.capacity_mah *= 2;
    CHECK(lifetime_hours(big, spec_with(2, 1800)) ==
          doctest::Approx(2.0 * lifetime_hours(table1, spec_with(2, 1800)))
              .epsilon(1e-12));
  }
}

TEST_CASE("lifetime monotonicity") {
  PowerProfile table1;
  for (double period : {60.0, 1800.0, 86400.0}) {
    double prev = lifetime_hours(table1, spec_with(2, period));
    for (int payload = 3; payload <= 102; ++payload) {
      double h = lifetime_hours(table1, spec_with(payload, period));
      CHECK(h < prev);
      prev = h;
    }
  }
  for (int payload : {2, 102}) {
    double prev = lifetime_hours(table1, spec_with(payload, 60));
    for (double period : {120.0, 600.0, 1800.0, 3600.0, 86400.0}) {
      double h = lifetime_hours(table1, spec_with(payload, period));
      CHECK(h > prev);
      prev = h;
    }
  }
}

TEST_CASE("average current stays inside the mode current envelope") {
  PowerProfile table1;
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> payload(2, 102);
  std::uniform_real_distribution<double> period(1.0, 1e6);
  double i_max = std::max({table1.i_onoff_ma, table1.i_listen_ma, table1.i_trans_ma});
  for (int i = 0; i < 2000; ++i) {
    DutyCycleSpec s = spec_with(payload(rng), period(rng));
    double avg = average_current_ma(table1, s);
    CHECK(avg >= table1.i_sleep_ma);
    CHECK(avg <= i_max);
    CHECK(lifetime_hours(table1, s) <=
          table1.capacity_mah / table1.i_sleep_ma + 1e-9);
  }
}

TEST_CASE("lifetime sweep") {
  PowerProfile table1;
  auto rows = lifetime_sweep(table1, {2, 102}, {60, 600, 1800, 3600});
  REQUIRE(rows.size() == 8);
  // 2-byte rows always outlive the 102-byte rows at equal periods
  for (size_t i = 0; i < 4; ++i) {
    CHECK(rows[i].update_period_s == rows[i + 4].update_period_s);
    CHECK(rows[i].lifetime_hours > rows[i + 4].lifetime_hours);
  }

  CHECK(lifetime_sweep(table1, {2}, {1800}).size() == 1);
  CHECK_THROWS_AS(lifetime_sweep(table1, {}, {1800}), std::domain_error);

  std::ostringstream csv;
  write_sweep_csv(csv, table1, rows);
  std::string text = csv.str();
  CHECK(text.rfind("payload_bytes,update_period_s,avg_current_ma,lifetime_hours\n",
                   0) == 0);
  CHECK(text.find("# sleep-current bound: capacity/i_sleep = 3333.33 h") !=
        std::string::npos);
}

TEST_CASE("battery drain") {
  PowerProfile table1;
  BatteryState full = fresh_battery(table1);
  CHECK(full.charge_mah == 2000.0);

  BatteryState after = drain(full, table1, Mode::listen, 3600.0);
  CHECK(after.charge_mah == doctest::Approx(1960.0).epsilon(1e-12));
  CHECK(after.mode == Mode::listen);

  CHECK(drain(full, table1, Mode::sleep, 0.0) ==
        BatteryState{2000.0, Mode::sleep});

  BatteryState low{0.1, Mode::sleep};
  BatteryState dead = drain(low, table1, Mode::transmit, 3600.0);
  CHECK(dead.charge_mah == 0.0);
  CHECK(dead.mode == Mode::depleted);

  CHECK_THROWS_AS(drain(full, table1, Mode::listen, -1.0), std::domain_error);
  CHECK_THROWS_AS(current_ma(table1, static_cast<Mode>(42)), std::domain_error);

  SUBCASE("drain from a dead battery stays dead") {
    CHECK(drain(dead, table1, Mode::listen, 100.0) ==
          BatteryState{0.0, Mode::depleted});
  }

  SUBCASE("split drains equal one combined drain") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dt(0.0, 5000.0);
    for (int i = 0; i < 500; ++i) {
      double t1 = dt(rng);
      double t2 = dt(rng);
      BatteryState split =
          drain(drain(full, table1, Mode::listen, t1), table1, Mode::listen, t2);
      BatteryState joined = drain(full, table1, Mode::listen, t1 + t2);
      CHECK(split.charge_mah ==
            doctest::Approx(joined.charge_mah).epsilon(1e-12));
      CHECK(split.mode == joined.mode);
    }
  }
}

TEST_CASE("rail voltage tracks the state of charge") {
  PowerProfile table1;
  CHECK(rail_voltage(table1, fresh_battery(table1)) == 3.3);
  CHECK(rail_voltage(table1, BatteryState{0.0, Mode::depleted}) == 2.0);
  CHECK(rail_voltage(table1, BatteryState{1000.0, Mode::sleep}) ==
        doctest::Approx(2.65).epsilon(1e-12));
}

TEST_CASE("profile validation") {
  PowerProfile bad;
  bad.i_sleep_ma = 50.0;
  CHECK_THROWS_AS(validate(bad), std::domain_error);
  PowerProfile neg;
  neg.capacity_mah = -1;
  CHECK_THROWS_AS(validate(neg), std::domain_error);
}
