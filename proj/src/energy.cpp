#include "wbsn/energy.hpp"

namespace wbsn {

std::string DevicePowerProfile::invalid_field() const {
  if (!(supply_voltage_v > 0)) return "supply_voltage_v";
  struct Pair {
    const char* active_name;
    double active;
    const char* idle_name;
    double idle;
  };
  const Pair pairs[] = {
      {"radio_i_transmit_a", radio_i_transmit_a, "radio_i_idle_a", radio_i_idle_a},
      {"radio_i_receive_a", radio_i_receive_a, "radio_i_idle_a", radio_i_idle_a},
      {"sensor_i_active_a", sensor_i_active_a, "sensor_i_idle_a", sensor_i_idle_a},
      {"mcu_i_active_a", mcu_i_active_a, "mcu_i_idle_a", mcu_i_idle_a},
  };
  for (const auto& p : pairs) {
    if (!(p.idle >= 0)) return p.idle_name;
    if (!(p.active >= p.idle)) return p.active_name;
  }
  if (!(battery_energy_budget_j > 0)) return "battery_energy_budget_j";
  return {};
}

std::string_view to_string(Device d) noexcept {
  switch (d) {
    case Device::radio: return "radio";
    case Device::sensor: return "sensor";
    case Device::mcu: return "mcu";
  }
  return "?";
}

std::string_view to_string(PowerState s) noexcept {
  switch (s) {
    case PowerState::transmit: return "transmit";
    case PowerState::receive: return "receive";
    case PowerState::idle: return "idle";
    case PowerState::active: return "active";
  }
  return "?";
}

double state_current(const DevicePowerProfile& profile, Device device, PowerState state) {
  switch (device) {
    case Device::radio:
      switch (state) {
        case PowerState::transmit: return profile.radio_i_transmit_a;
        case PowerState::receive: return profile.radio_i_receive_a;
        case PowerState::idle: return profile.radio_i_idle_a;
        case PowerState::active: break;
      }
      break;
    case Device::sensor:
    case Device::mcu:
      if (state == PowerState::active)
        return device == Device::sensor ? profile.sensor_i_active_a : profile.mcu_i_active_a;
      if (state == PowerState::idle)
        return device == Device::sensor ? profile.sensor_i_idle_a : profile.mcu_i_idle_a;
      break;
  }
  throw UnknownState(std::string(to_string(device)) + "/" + std::string(to_string(state)));
}

double state_energy(const DevicePowerProfile& profile, Device device, PowerState state,
                    double duration_s) {
  if (duration_s < 0) throw std::domain_error("duration must be non-negative");
  return energy(power(profile.supply_voltage_v, state_current(profile, device, state)), duration_s);
}

EnergyLedger accrue(EnergyLedger ledger, const DevicePowerProfile& profile, Device device,
                    PowerState state, double duration_s) {
  double joules = state_energy(profile, device, state, duration_s);
  if (joules == 0.0) return ledger;
  if (state == PowerState::idle) {
    ledger.idle_j += joules;
  } else if (device == Device::radio) {
    (state == PowerState::transmit ? ledger.transmit_j : ledger.receive_j) += joules;
  } else if (device == Device::sensor) {
    ledger.sensing_j += joules;
  } else {
    ledger.mcu_j += joules;
  }
  ledger.total_j += joules;
  return ledger;
}

double lifetime_s(const DevicePowerProfile& profile, double average_power_w) {
  if (!(average_power_w > 0)) throw std::domain_error("average power must be positive");
  return profile.battery_energy_budget_j / average_power_w;
}

std::vector<EnergySweepRow> energy_sweep(std::span<const double> bits_list,
                                         std::span<const long> repetitions_list,
                                         const DevicePowerProfile& profile,
                                         const DelayParams& params, double period_s) {
  if (bits_list.empty() || repetitions_list.empty())
    throw std::invalid_argument("energy sweep needs non-empty bits and repetitions");
  std::vector<EnergySweepRow> rows;
  rows.reserve(bits_list.size() * repetitions_list.size());
  for (double bits : bits_list) {
    for (long reps : repetitions_list) {
      if (bits < 0 || reps < 0) throw std::domain_error("bits and repetitions must be non-negative");
      EnergySweepRow row;
      row.bits = bits;
      row.repetitions = reps;
      double on_air = airtime(bits, params);
      auto n = static_cast<double>(reps);
      row.e_tx_j = n * state_energy(profile, Device::radio, PowerState::transmit, on_air);
      row.e_rx_j = n * state_energy(profile, Device::radio, PowerState::receive, on_air);
      row.e_idle_j = state_energy(profile, Device::radio, PowerState::idle, n * period_s);
      row.e_total_j = row.e_tx_j + row.e_rx_j + row.e_idle_j;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace wbsn
