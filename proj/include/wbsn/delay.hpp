#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace wbsn {

/// Device and link parameters feeding the per-packet latency budget.
/// All times in seconds, rates in bits/second.
struct DelayParams {
  double mcu_clock_hz = 8'000'000.0;
  double mac_instruction_clocks = 316.0;
  double radio_switch_delay_s = 130e-6;
  double air_data_rate_bps = 19'200.0;
  double serial_rate_bps = 19'200.0;   // FT232 RS232->USB converter
  double usb_rate_bps = 12'000'000.0;  // full-speed USB
  double sensor_conversion_s = 0.750;
  double propagation_speed_mps = 2.998e8;
  // Extra delay per meter folded into the air term; zero means pure physics.
  double per_meter_penalty_s = 0.0;

  /// Empty string when valid, otherwise the first offending field name.
  std::string invalid_field() const;
};

/// One packet's end-to-end latency split into its eight stages.
///
///   t1  microcontroller data preparation (MAC instruction clocks)
///   t2  transmitter radio mode switch
///   t3  propagation through the air
///   t4  serialization airtime of the frame bits
///   t5  receiver radio mode switch at the access point
///   t6  RS232->USB converter serialization
///   t7  temperature sensor conversion
///   t8  USB wire transfer
struct DelayBudget {
  static constexpr std::size_t kTerms = 8;
  std::array<double, kTerms> terms{};
  double total = 0.0;

  double t(std::size_t stage) const { return terms.at(stage - 1); }

  /// Recomputes `total` as the left-to-right sum t1 + ... + t8.
  void close();
};

std::string_view stage_label(std::size_t stage);

double mcu_prep_delay(const DelayParams& p);
double airtime(double bits, const DelayParams& p);
double propagation_delay(double distance_m, const DelayParams& p);
double serial_delay(double bits, const DelayParams& p);
double usb_delay(double bits, const DelayParams& p);

DelayBudget total_delay(double bits, double distance_m, const DelayParams& p);

/// d(total)/d(bits) under `p`.
double delay_slope_per_bit(const DelayParams& p);

}  // namespace wbsn
