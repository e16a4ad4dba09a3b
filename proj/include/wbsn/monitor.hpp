#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "wbsn/ident.hpp"
#include "wbsn/trace.hpp"

namespace wbsn {

inline constexpr double kTempResolutionC = 0.0625;

inline double raw_to_celsius(std::int16_t raw) { return raw * kTempResolutionC; }

/// One temperature sample as delivered to the monitoring host.
struct Reading {
  SensorId sensor_id;
  double time_s = 0;  // serial_out time at the host
  double temp_c = 0;
  std::int16_t raw = 0;
  std::uint16_t sequence = 0;
  double total_delay_s = 0;  // sampling instant -> host

  /// Physical sampling instant (conversion start).
  double sample_time_s() const { return time_s - total_delay_s; }

  bool operator==(const Reading&) const = default;
};

Reading make_reading(const SensorId& id, double time_s, std::int16_t raw, std::uint16_t sequence,
                     double total_delay_s);

struct AlertRule {
  double high_threshold_c = 38.0;
  double rise_rate_c_per_min = 0.5;
  double rise_window_s = 60.0;

  std::string invalid_field(double sampling_period_s) const;
};

enum class AlertKind { high_temp, rapid_rise };
std::string_view to_string(AlertKind k) noexcept;

struct Alert {
  AlertKind kind = AlertKind::high_temp;
  SensorId sensor_id;
  double trigger_time_s = 0;
  double value = 0;  // C for high_temp, C/min for rapid_rise

  bool operator==(const Alert&) const = default;
};

/// High-temperature alerts fire on the first reading at or above the
/// threshold and re-arm once a reading drops below it. Rapid-rise alerts fire
/// when the least-squares slope over the trailing window reaches the rate,
/// and re-arm once the slope falls below it. The slope is only evaluated when
/// the window holds at least three readings spanning half the window.
std::vector<Alert> evaluate_alerts(const std::vector<Reading>& series, const AlertRule& rule);

struct AgreementStats {
  double mae_c = 0;
  double max_err_c = 0;
  std::size_t n = 0;
};

class EmptySeries : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Errors measured against the truth at each reading's sampling instant.
AgreementStats agreement(const std::vector<Reading>& series, const TemperatureTrace& truth);

struct StoreCounters {
  std::size_t ingested = 0;
  std::size_t duplicates = 0;
  std::size_t unknown = 0;
  std::size_t invalid_id = 0;
};

/// Immutable view of the store at one instant.
struct StoreSnapshot {
  std::map<SensorId, std::vector<Reading>> series;
  StoreCounters counters;

  std::size_t stored() const;
};

/// Per-sensor time series. One writer; any number of readers take snapshots,
/// which never observe a half-applied ingest.
class MonitorStore {
 public:
  MonitorStore() = default;
  /// Strict mode: readings from sensors outside `roster` are counted and dropped.
  explicit MonitorStore(std::set<SensorId> roster) : roster_(std::move(roster)) {}
  MonitorStore(MonitorStore&& other) noexcept;
  MonitorStore& operator=(MonitorStore&&) = delete;

  enum class IngestResult { stored, duplicate, unknown_sensor, invalid_id };

  IngestResult ingest(const Reading& r);

  StoreSnapshot snapshot() const;
  std::vector<Reading> series(const SensorId& id) const;
  StoreCounters counters() const;

 private:
  // Duplicate (sensor, sequence) pairs are only recognised within this many
  // ingests of the same sensor, since the counter wraps at 2^16.
  static constexpr std::size_t kDuplicateHorizon = 32768;

  struct PerSensor {
    std::vector<Reading> readings;
    std::unordered_map<std::uint16_t, std::size_t> last_seen;  // sequence -> ingest ordinal
    std::size_t ordinal = 0;
  };

  mutable std::mutex mu_;
  std::optional<std::set<SensorId>> roster_;
  std::map<SensorId, PerSensor> sensors_;
  StoreCounters counters_;
};

class ExportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes readings_<sensor-hex>.csv per sensor plus plot.csv (time column and
/// one temperature column per sensor) into `dir`. Returns written paths.
std::vector<std::filesystem::path> export_store(const StoreSnapshot& snapshot,
                                                const std::filesystem::path& dir);

/// Reads every readings_*.csv under `dir` back into a store.
MonitorStore import_store(const std::filesystem::path& dir);

std::string readings_csv_header();
std::string reading_csv_row(const Reading& r);
std::optional<Reading> parse_reading_row(std::string_view line);

std::string alerts_csv(const std::vector<Alert>& alerts);

}  // namespace wbsn
