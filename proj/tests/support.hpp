#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <map>

#include "wbsn/config.hpp"
#include "wbsn/simulator.hpp"
#include "wbsn/ident.hpp"
#include "wbsn/trace.hpp"

namespace wbsn::fixtures {

// Reference CRC: shift register fed one bit at a time, LSB first.
inline std::uint8_t crc8_bitwise(const std::uint8_t* data, std::size_t n) {
  std::uint8_t reg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (int b = 0; b < 8; ++b) {
      bool in = ((data[i] >> b) & 1) ^ (reg & 1);
      reg >>= 1;
      if (in) reg ^= 0x8C;
    }
  }
  return reg;
}

inline NodeConfig node(std::uint64_t serial, const std::string& trace, double distance = 10.0,
                       double phase = 0.0) {
  NodeConfig n;
  n.id = make_sensor_id(kDs18b20Family, serial);
  n.trace = parse_trace(trace, serial);
  n.distance_m = distance;
  n.phase_s = phase;
  return n;
}

inline ScenarioConfig scenario(std::size_t nodes, double duration, std::uint64_t seed = 1,
                               const std::string& trace = "constant:36.5") {
  ScenarioConfig c;
  c.duration_s = duration;
  c.seed = seed;
  for (std::size_t i = 0; i < nodes; ++i) c.nodes.push_back(node(0x100 + i, trace));
  return c;
}

// Fresh directory under the build tree's temp area.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("wbsn_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Node energy rebuilt from the event log alone: sensor active between
// conversion_start and conversion_done, MCU active until frame_ready, radio
// transmitting between tx_start and tx_end, idle otherwise.
inline std::map<std::string, double> energy_from_events(const ScenarioResult& r,
                                                        const ScenarioConfig& c) {
  struct Device {
    double since = 0;
    double amps;
    bool active = false;
  };
  struct Node {
    Device sensor, mcu, radio;
    double joules = 0;
  };
  const auto& p = c.power;
  std::map<std::string, Node> nodes;
  for (const auto& n : c.nodes) {
    Node fresh{{0, p.sensor_i_idle_a}, {0, p.mcu_i_idle_a}, {0, p.radio_i_idle_a}, 0};
    nodes.emplace(to_hex(n.id), fresh);
  }
  auto change = [&](Node& n, Device& d, double t, bool active, double idle_a, double active_a) {
    n.joules += p.supply_voltage_v * d.amps * (t - d.since);
    d.since = t;
    d.active = active;
    d.amps = active ? active_a : idle_a;
  };
  for (const auto& e : r.events) {
    auto it = nodes.find(e.subject);
    if (it == nodes.end()) continue;
    auto& n = it->second;
    switch (e.kind) {
      case EventKind::conversion_start:
        change(n, n.sensor, e.time_s, true, p.sensor_i_idle_a, p.sensor_i_active_a);
        break;
      case EventKind::conversion_done:
        change(n, n.sensor, e.time_s, false, p.sensor_i_idle_a, p.sensor_i_active_a);
        change(n, n.mcu, e.time_s, true, p.mcu_i_idle_a, p.mcu_i_active_a);
        break;
      case EventKind::frame_ready:
        change(n, n.mcu, e.time_s, false, p.mcu_i_idle_a, p.mcu_i_active_a);
        break;
      case EventKind::tx_start:
        change(n, n.radio, e.time_s, true, p.radio_i_idle_a, p.radio_i_transmit_a);
        break;
      case EventKind::tx_end:
        change(n, n.radio, e.time_s, false, p.radio_i_idle_a, p.radio_i_transmit_a);
        break;
      default:
        break;
    }
  }
  std::map<std::string, double> out;
  for (auto& [hex, n] : nodes) {
    for (Device* d : {&n.sensor, &n.mcu, &n.radio}) n.joules += p.supply_voltage_v * d->amps * (r.end_time_s - d->since);
    out[hex] = n.joules;
  }
  return out;
}

}  // namespace wbsn::fixtures
