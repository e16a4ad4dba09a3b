#include "wbsn/delay.hpp"

#include <stdexcept>

namespace wbsn {

std::string DelayParams::invalid_field() const {
  if (!(mcu_clock_hz > 0)) return "mcu_clock_hz";
  if (!(mac_instruction_clocks >= 0)) return "mac_instruction_clocks";
  if (!(radio_switch_delay_s >= 0)) return "radio_switch_delay_s";
  if (!(air_data_rate_bps > 0)) return "air_data_rate_bps";
  if (!(serial_rate_bps > 0)) return "serial_rate_bps";
  if (!(usb_rate_bps > 0)) return "usb_rate_bps";
  if (!(sensor_conversion_s >= 0)) return "sensor_conversion_s";
  if (!(propagation_speed_mps > 0)) return "propagation_speed_mps";
  if (!(per_meter_penalty_s >= 0)) return "per_meter_penalty_s";
  return {};
}

void DelayBudget::close() {
  double sum = 0.0;
  for (double term : terms) sum += term;
  total = sum;
}

std::string_view stage_label(std::size_t stage) {
  static constexpr std::string_view kLabels[] = {
      "mcu_prep", "tx_switch", "propagation", "airtime",
      "rx_switch", "serial", "sensor_conversion", "usb"};
  if (stage < 1 || stage > DelayBudget::kTerms) throw std::out_of_range("delay stage");
  return kLabels[stage - 1];
}

double mcu_prep_delay(const DelayParams& p) { return p.mac_instruction_clocks / p.mcu_clock_hz; }

double airtime(double bits, const DelayParams& p) { return bits / p.air_data_rate_bps; }

double propagation_delay(double distance_m, const DelayParams& p) {
  return distance_m / p.propagation_speed_mps + distance_m * p.per_meter_penalty_s;
}

double serial_delay(double bits, const DelayParams& p) { return bits / p.serial_rate_bps; }

double usb_delay(double bits, const DelayParams& p) { return bits / p.usb_rate_bps; }

DelayBudget total_delay(double bits, double distance_m, const DelayParams& p) {
  if (bits < 0) throw std::domain_error("bits must be non-negative");
  if (distance_m < 0) throw std::domain_error("distance must be non-negative");
  DelayBudget b;
  b.terms = {
      mcu_prep_delay(p),
      p.radio_switch_delay_s,
      propagation_delay(distance_m, p),
      airtime(bits, p),
      p.radio_switch_delay_s,
      serial_delay(bits, p),
      p.sensor_conversion_s,
      usb_delay(bits, p),
  };
  b.close();
  return b;
}

double delay_slope_per_bit(const DelayParams& p) {
  return 1.0 / p.air_data_rate_bps + 1.0 / p.serial_rate_bps + 1.0 / p.usb_rate_bps;
}

}  // namespace wbsn
