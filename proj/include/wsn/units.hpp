#pragma once

#include <stdexcept>

namespace wsn::units {

inline constexpr int kAdcFullScale = 1023;          // 10-bit converter
inline constexpr double kAdcReferenceMv = 1200.0;   // radio analog reference
inline constexpr double kSupplyDividerRatio = 3.0;  // 3:1 divider on the rail
inline constexpr double kSupplyFullScaleV = 3.6;
inline constexpr double kTempFullScaleC = 120.0;    // 1.2 V at 10 mV/degree

// One 10-bit sample as read against the 1.2 V reference.
struct AdcReading {
  explicit AdcReading(int raw_count);
  int raw;
};

struct DividerConfig {
  double r1_ohm = 200.0;
  double r2_ohm = 100.0;
  double vin_v = 3.3;
};

// raw * 1200 / 1023, full precision.
double adc_to_millivolts(AdcReading reading);

// mv / 10 (10 mV per degree Celsius).
double millivolts_to_celsius(double mv);

// vin * r2 / (r1 + r2).
double divider_output(const DividerConfig& cfg);

// raw * 1200 * 3 / 1023 / 1000, volts on the supply rail behind the divider.
double adc_to_supply_volts(AdcReading reading);

// Inverses used by the simulator. Round half up, then clamp to 0..1023.
AdcReading supply_volts_to_adc(double volts);
AdcReading celsius_to_adc(double celsius);

}  // namespace wsn::units
