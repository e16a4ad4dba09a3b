#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wbsn/access_point.hpp"
#include "wbsn/config.hpp"
#include "wbsn/delay.hpp"
#include "wbsn/energy.hpp"
#include "wbsn/monitor.hpp"
#include "wbsn/trace.hpp"

namespace wbsn {

enum class EventKind {
  beacon,
  sample_tick,  // internal, never logged
  conversion_start,
  conversion_done,
  frame_ready,
  slot_start,
  rssi_sample,
  tx_start,
  tx_end,
  rx_start,
  rx_end,  // internal; logged as rx_deliver or rx_collision
  rx_deliver,
  rx_collision,
  serial_start,
  usb_start,
  serial_out,
};

std::string_view to_string(EventKind k) noexcept;

/// One logged event. Logged events appear in (time_s, seq) order.
struct SimEvent {
  double time_s = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::beacon;
  std::string subject;  // sensor hex id, "ap" or "interferer"
  std::string detail;

  bool operator==(const SimEvent&) const = default;
};

/// DS18B20-like sensor: noisy, quantised to 1/16 C and clamped to its range.
struct SensorModel {
  double resolution_c = kTempResolutionC;
  double conversion_time_s = 0.750;
  double noise_sigma_c = 0.1;
  double min_c = -55.0;
  double max_c = 125.0;
  TemperatureTrace trace;
};

std::int16_t sense_and_quantize(const SensorModel& sensor, double t, Xoshiro256& rng);

/// Stage timings of one delivered packet, measured from event timestamps.
struct PacketRecord {
  SensorId sensor_id;
  std::uint16_t sequence = 0;
  std::int16_t raw = 0;
  double conversion_start_s = 0;
  double serial_out_s = 0;
  DelayBudget measured;
  double queue_wait_s = 0;  // frame ready -> channel sense, includes deferrals
  double end_to_end_s = 0;  // conversion start -> serial out
  unsigned retries = 0;
};

struct SimCounters {
  std::size_t samples = 0;
  std::size_t transmissions = 0;
  std::size_t deliveries = 0;
  std::size_t collisions = 0;   // rx_collision events
  std::size_t out_of_range = 0;
  std::size_t deferrals = 0;    // busy RSSI samples
  std::size_t dropped_frames = 0;  // replaced while still pending
  std::size_t unsynced_samples = 0;
  CorruptionCounts corruption;
};

struct ScenarioResult {
  std::vector<SimEvent> events;
  std::vector<Reading> readings;
  std::vector<PacketRecord> packets;
  std::map<SensorId, EnergyLedger> node_ledgers;
  EnergyLedger ap_ledger;
  SimCounters counters;
  double end_time_s = 0;
};

/// Runs the scenario to completion: sampling ticks and beacons are issued for
/// t < duration_s, in-flight packets are then drained. Deterministic in
/// (config, seed). Throws ValidationError on an invalid config.
ScenarioResult run_scenario(const ScenarioConfig& config);

std::string events_csv(const std::vector<SimEvent>& events);
std::string readings_csv(const std::vector<Reading>& readings);
std::string ledgers_csv(const ScenarioResult& result);
std::string packets_csv(const std::vector<PacketRecord>& packets);

}  // namespace wbsn
