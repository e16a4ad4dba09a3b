#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "wbsn/delay.hpp"
#include "wbsn/energy.hpp"
#include "wbsn/ident.hpp"
#include "wbsn/medium.hpp"
#include "wbsn/monitor.hpp"
#include "wbsn/tdma.hpp"
#include "wbsn/trace.hpp"

namespace wbsn {

enum class MacMode { tdma, aloha };
std::string_view to_string(MacMode m) noexcept;

struct NodeConfig {
  SensorId id;
  TemperatureTrace trace;
  double distance_m = 10.0;
  // Offset added to every sampling tick of this node.
  double phase_s = 0.0;
};

/// Periodic jammer used to exercise the busy-channel branch of the MAC.
struct InterfererConfig {
  bool enabled = false;
  double offset_s = 0.0;
  double period_s = 1.0;
  double burst_s = 0.01;
  double distance_m = 10.0;
};

struct ScenarioConfig {
  double duration_s = 60.0;
  std::uint64_t seed = 1;
  double sample_period_s = 1.0;
  double range_m = kDefaultRadioRangeM;
  double noise_sigma_c = 0.1;
  MacMode mac_mode = MacMode::tdma;
  std::vector<NodeConfig> nodes;
  DelayParams delay;
  DevicePowerProfile power;
  double guard_s = kDefaultGuardS;
  double beacon_slot_s = kDefaultBeaconSlotS;
  AlertRule alert;
  InterfererConfig interferer;
};

/// Malformed input. `line` is 0 when the error concerns the file as a whole.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string where, std::size_t line, const std::string& what)
      : std::runtime_error(where + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input violating a field invariant.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Checks every invariant the simulator relies on. Duration 0 is accepted
/// here (an empty run); the file loader requires a positive duration.
void validate(const ScenarioConfig& config);

ScenarioConfig parse_config(std::string_view text, const std::string& origin = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);

/// Key reference with defaults, shown by `--help`.
std::string config_reference();

/// The schedule a TDMA run of `config` uses.
SlotSchedule schedule_for(const ScenarioConfig& config);

}  // namespace wbsn
