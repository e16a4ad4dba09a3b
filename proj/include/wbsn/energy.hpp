#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wbsn/delay.hpp"

namespace wbsn {

/// Supply voltage and per-device current draw of one node.
struct DevicePowerProfile {
  double supply_voltage_v = 9.0;
  double radio_i_transmit_a = 0.016;
  double radio_i_receive_a = 0.036;
  double radio_i_idle_a = 1e-6;
  double sensor_i_active_a = 0.009;
  double sensor_i_idle_a = 8e-9;
  double mcu_i_active_a = 0.0036;
  double mcu_i_idle_a = 0.001;
  // 9 V x 500 mAh.
  double battery_energy_budget_j = 16'200.0;
  // Nameplate battery figures; carried as metadata, not used by the model.
  double battery_nameplate_w = 500.0;
  double battery_initial_current_a = 0.016;

  std::string invalid_field() const;
};

enum class Device { radio, sensor, mcu };
enum class PowerState { transmit, receive, idle, active };

std::string_view to_string(Device d) noexcept;
std::string_view to_string(PowerState s) noexcept;

class UnknownState : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline double power(double volts, double amperes) { return volts * amperes; }
inline double energy(double watts, double seconds) { return watts * seconds; }

/// Current drawn by `device` in `state`; throws UnknownState for pairs the
/// device does not have (e.g. sensor/transmit).
double state_current(const DevicePowerProfile& profile, Device device, PowerState state);

double state_energy(const DevicePowerProfile& profile, Device device, PowerState state,
                    double duration_s);

/// Accumulated joules for one node, split by what drew them.
struct EnergyLedger {
  double transmit_j = 0.0;  // radio transmitting
  double receive_j = 0.0;   // radio receiving
  double idle_j = 0.0;      // any device in its idle state
  double sensing_j = 0.0;   // sensor converting
  double mcu_j = 0.0;       // microcontroller active
  double total_j = 0.0;

  bool operator==(const EnergyLedger&) const = default;
};

EnergyLedger accrue(EnergyLedger ledger, const DevicePowerProfile& profile, Device device,
                    PowerState state, double duration_s);

/// Estimated battery lifetime at a constant average power draw.
double lifetime_s(const DevicePowerProfile& profile, double average_power_w);

struct EnergySweepRow {
  double bits = 0;
  long repetitions = 0;
  double e_tx_j = 0;
  double e_rx_j = 0;
  double e_idle_j = 0;
  double e_total_j = 0;
};

/// Radio energy for `repetitions` frames of `bits` each. Transmit and receive
/// cover the airtime of every frame; idle covers the whole experiment window
/// of `repetitions * period_s` seconds at the radio idle current.
std::vector<EnergySweepRow> energy_sweep(std::span<const double> bits_list,
                                         std::span<const long> repetitions_list,
                                         const DevicePowerProfile& profile,
                                         const DelayParams& params, double period_s = 1.0);

}  // namespace wbsn
