#include "wsn/units.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wsn::units {

namespace {

int round_half_up_clamped(double x) {
  int v = static_cast<int>(std::floor(x + 0.5));
  return std::clamp(v, 0, kAdcFullScale);
}

}  // namespace

AdcReading::AdcReading(int raw_count) : raw(raw_count) {
  if (raw < 0 || raw > kAdcFullScale) {
    throw std::domain_error("adc reading out of range 0..1023: " +
                            std::to_string(raw));
  }
}

double adc_to_millivolts(AdcReading reading) {
  return reading.raw * kAdcReferenceMv / kAdcFullScale;
}

double millivolts_to_celsius(double mv) {
  if (mv < 0) {
    throw std::domain_error("negative millivolts: " + std::to_string(mv));
  }
  return mv / 10.0;
}

double divider_output(const DividerConfig& cfg) {
  if (cfg.r1_ohm <= 0 || cfg.r2_ohm <= 0) {
    throw std::domain_error("divider resistances must be positive");
  }
  if (cfg.vin_v < 0) {
    throw std::domain_error("negative divider input voltage");
  }
  return cfg.vin_v * cfg.r2_ohm / (cfg.r1_ohm + cfg.r2_ohm);
}

double adc_to_supply_volts(AdcReading reading) {
  return reading.raw * kAdcReferenceMv * kSupplyDividerRatio / kAdcFullScale /
         1000.0;
}

AdcReading supply_volts_to_adc(double volts) {
  if (volts < 0 || volts > kSupplyFullScaleV) {
    throw std::domain_error("supply volts out of range 0..3.6: " +
                            std::to_string(volts));
  }
  return AdcReading(round_half_up_clamped(volts * 1000.0 * kAdcFullScale /
                                          (kAdcReferenceMv * kSupplyDividerRatio)));
}

AdcReading celsius_to_adc(double celsius) {
  if (celsius < 0 || celsius > kTempFullScaleC) {
    throw std::domain_error("temperature out of range 0..120: " +
                            std::to_string(celsius));
  }
  return AdcReading(
      round_half_up_clamped(celsius * 10.0 * kAdcFullScale / kAdcReferenceMv));
}

}  // namespace wsn::units
