#include "wbsn/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "wbsn/csv.hpp"

namespace wbsn {

std::string_view to_string(MacMode m) noexcept { return m == MacMode::tdma ? "tdma" : "aloha"; }

namespace {

std::string node_field(std::size_t pos, std::string_view key) {
  return "node." + std::to_string(pos) + "." + std::string(key);
}

void check(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ValidationError(field, what);
}

}  // namespace

SlotSchedule schedule_for(const ScenarioConfig& config) {
  std::vector<SensorId> ids;
  ids.reserve(config.nodes.size());
  for (const auto& n : config.nodes) ids.push_back(n.id);
  return build_schedule(ids, static_cast<double>(kFrameBits), config.delay, config.guard_s,
                        config.beacon_slot_s);
}

void validate(const ScenarioConfig& c) {
  check(c.duration_s >= 0 && std::isfinite(c.duration_s), "scenario.duration_s", "must be >= 0");
  check(c.sample_period_s > 0, "scenario.sample_period_s", "must be > 0");
  check(c.range_m > 0, "scenario.range_m", "must be > 0");
  check(c.noise_sigma_c >= 0, "sensor.noise_sigma_c", "must be >= 0");
  check(!c.nodes.empty(), "node", "at least one node is required");

  std::set<std::uint64_t> serials;
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    const auto& n = c.nodes[i];
    check(validate_sensor_id(n.id), node_field(i, "serial"), "sensor id fails crc check");
    check(serials.insert(n.id.serial).second, node_field(i, "serial"),
          "duplicate serial " + std::to_string(n.id.serial));
    check(n.distance_m >= 0, node_field(i, "distance_m"), "must be >= 0");
    check(n.phase_s >= 0, node_field(i, "phase_s"), "must be >= 0");
  }

  if (auto f = c.delay.invalid_field(); !f.empty()) throw ValidationError("delay." + f, "invalid value");
  if (auto f = c.power.invalid_field(); !f.empty()) throw ValidationError("power." + f, "invalid value");
  check(c.guard_s >= 0, "schedule.guard_s", "must be >= 0");
  check(c.beacon_slot_s > 0, "schedule.beacon_slot_s", "must be > 0");
  if (auto f = c.alert.invalid_field(c.sample_period_s); !f.empty())
    throw ValidationError("alert." + f, "must be positive (window >= 2 sampling periods)");

  if (c.interferer.enabled) {
    const auto& j = c.interferer;
    check(j.period_s > 0, "interferer.period_s", "must be > 0");
    check(j.burst_s > 0 && j.burst_s < j.period_s, "interferer.burst_s", "must be in (0, period)");
    check(j.offset_s >= 0, "interferer.offset_s", "must be >= 0");
    check(j.distance_m >= 0, "interferer.distance_m", "must be >= 0");
  }

  const auto& d = c.delay;
  double prep = d.sensor_conversion_s + mcu_prep_delay(d);
  if (c.mac_mode == MacMode::tdma) {
    auto schedule = schedule_for(c);
    double frame = schedule.frame_period_s;
    check(frame <= c.sample_period_s, "scenario.sample_period_s",
          "shorter than the TDMA frame period " + format_double(frame) + " s");
    // Consecutive conversions of one node are at least floor(P/F)*F apart.
    double min_gap = std::floor(c.sample_period_s / frame + 1e-9) * frame;
    check(min_gap + 1e-9 >= prep, "scenario.sample_period_s",
          "conversions would overlap with a frame period of " + format_double(frame) + " s");
  } else {
    double busy = prep + d.radio_switch_delay_s + airtime(static_cast<double>(kFrameBits), d);
    check(c.sample_period_s >= busy, "scenario.sample_period_s",
          "shorter than one conversion plus transmission");
  }
}

namespace {

using Setter = std::function<void(ScenarioConfig&, std::string_view)>;

struct PendingNode {
  std::optional<std::uint64_t> serial;
  std::uint8_t family = kDs18b20Family;
  std::string trace = "constant:37";
  double distance_m = 10.0;
  double phase_s = 0.0;
  std::size_t line = 0;
  std::size_t trace_line = 0;
};

double as_double(std::string_view v) {
  auto d = parse_double(v);
  if (!d || !std::isfinite(*d)) throw std::invalid_argument("expected a number, got '" + std::string(v) + "'");
  return *d;
}

std::uint64_t as_uint(std::string_view v) {
  auto i = parse_int(v);
  if (!i || *i < 0) throw std::invalid_argument("expected a non-negative integer, got '" + std::string(v) + "'");
  return static_cast<std::uint64_t>(*i);
}

bool as_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("expected true/false, got '" + std::string(v) + "'");
}

Setter dbl(double ScenarioConfig::*m) {
  return [m](ScenarioConfig& c, std::string_view v) { c.*m = as_double(v); };
}
template <class Sub>
Setter dbl(Sub ScenarioConfig::*sub, double Sub::*m) {
  return [sub, m](ScenarioConfig& c, std::string_view v) { (c.*sub).*m = as_double(v); };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    using C = ScenarioConfig;
    t["scenario.duration_s"] = dbl(&C::duration_s);
    t["scenario.seed"] = [](C& c, std::string_view v) { c.seed = as_uint(v); };
    t["scenario.sample_period_s"] = dbl(&C::sample_period_s);
    t["scenario.range_m"] = dbl(&C::range_m);
    t["scenario.mac_mode"] = [](C& c, std::string_view v) {
      if (v == "tdma") c.mac_mode = MacMode::tdma;
      else if (v == "aloha") c.mac_mode = MacMode::aloha;
      else throw std::invalid_argument("expected tdma or aloha");
    };
    t["sensor.noise_sigma_c"] = dbl(&C::noise_sigma_c);

    t["delay.mcu_clock_hz"] = dbl(&C::delay, &DelayParams::mcu_clock_hz);
    t["delay.mac_instruction_clocks"] = dbl(&C::delay, &DelayParams::mac_instruction_clocks);
    t["delay.radio_switch_delay_s"] = dbl(&C::delay, &DelayParams::radio_switch_delay_s);
    t["delay.air_data_rate_bps"] = dbl(&C::delay, &DelayParams::air_data_rate_bps);
    t["delay.serial_rate_bps"] = dbl(&C::delay, &DelayParams::serial_rate_bps);
    t["delay.usb_rate_bps"] = dbl(&C::delay, &DelayParams::usb_rate_bps);
    t["delay.sensor_conversion_s"] = dbl(&C::delay, &DelayParams::sensor_conversion_s);
    t["delay.propagation_speed_mps"] = dbl(&C::delay, &DelayParams::propagation_speed_mps);
    t["delay.per_meter_penalty_s"] = dbl(&C::delay, &DelayParams::per_meter_penalty_s);

    using P = DevicePowerProfile;
    t["power.supply_voltage_v"] = dbl(&C::power, &P::supply_voltage_v);
    t["power.radio_i_transmit_a"] = dbl(&C::power, &P::radio_i_transmit_a);
    t["power.radio_i_receive_a"] = dbl(&C::power, &P::radio_i_receive_a);
    t["power.radio_i_idle_a"] = dbl(&C::power, &P::radio_i_idle_a);
    t["power.sensor_i_active_a"] = dbl(&C::power, &P::sensor_i_active_a);
    t["power.sensor_i_idle_a"] = dbl(&C::power, &P::sensor_i_idle_a);
    t["power.mcu_i_active_a"] = dbl(&C::power, &P::mcu_i_active_a);
    t["power.mcu_i_idle_a"] = dbl(&C::power, &P::mcu_i_idle_a);
    t["power.battery_energy_budget_j"] = dbl(&C::power, &P::battery_energy_budget_j);
    t["power.battery_nameplate_w"] = dbl(&C::power, &P::battery_nameplate_w);
    t["power.battery_initial_current_a"] = dbl(&C::power, &P::battery_initial_current_a);

    t["schedule.guard_s"] = dbl(&C::guard_s);
    t["schedule.beacon_slot_s"] = dbl(&C::beacon_slot_s);

    t["alert.high_threshold_c"] = dbl(&C::alert, &AlertRule::high_threshold_c);
    t["alert.rise_rate_c_per_min"] = dbl(&C::alert, &AlertRule::rise_rate_c_per_min);
    t["alert.rise_window_s"] = dbl(&C::alert, &AlertRule::rise_window_s);

    using I = InterfererConfig;
    t["interferer.enabled"] = [](C& c, std::string_view v) { c.interferer.enabled = as_bool(v); };
    t["interferer.offset_s"] = dbl(&C::interferer, &I::offset_s);
    t["interferer.period_s"] = dbl(&C::interferer, &I::period_s);
    t["interferer.burst_s"] = dbl(&C::interferer, &I::burst_s);
    t["interferer.distance_m"] = dbl(&C::interferer, &I::distance_m);
    return t;
  }();
  return table;
}

void set_node_key(PendingNode& n, std::string_view key, std::string_view value) {
  if (key == "serial") {
    auto s = as_uint(value);
    if (s > kSerialMask) throw std::invalid_argument("serial exceeds 48 bits");
    n.serial = s;
  } else if (key == "family") {
    auto f = as_uint(value);
    if (f > 0xFF) throw std::invalid_argument("family code exceeds 8 bits");
    n.family = static_cast<std::uint8_t>(f);
  } else if (key == "trace") {
    n.trace = std::string(value);
  } else if (key == "distance_m") {
    n.distance_m = as_double(value);
  } else if (key == "phase_s") {
    n.phase_s = as_double(value);
  } else {
    throw std::out_of_range("unknown key");
  }
}

}  // namespace

ScenarioConfig parse_config(std::string_view text, const std::string& origin) {
  ScenarioConfig config;
  std::map<std::size_t, PendingNode> nodes;
  std::set<std::string, std::less<>> seen;

  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(origin, line_no, "expected key = value");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(origin, line_no, "empty key");
    if (!seen.insert(std::string(key)).second)
      throw ParseError(origin, line_no, "key '" + std::string(key) + "' set twice");

    try {
      if (key.starts_with("node.")) {
        auto rest = key.substr(5);
        auto dot = rest.find('.');
        if (dot == std::string_view::npos) throw std::out_of_range("unknown key");
        auto index = parse_int(rest.substr(0, dot));
        if (!index || *index < 0) throw std::out_of_range("unknown key");
        auto& n = nodes[static_cast<std::size_t>(*index)];
        if (!n.line) n.line = line_no;
        auto field = rest.substr(dot + 1);
        set_node_key(n, field, value);
        if (field == "trace") n.trace_line = line_no;
      } else if (auto it = setters().find(key); it != setters().end()) {
        it->second(config, value);
      } else {
        throw std::out_of_range("unknown key");
      }
    } catch (const std::out_of_range&) {
      throw ParseError(origin, line_no, "unknown key '" + std::string(key) + "'");
    } catch (const std::invalid_argument& e) {
      throw ParseError(origin, line_no, std::string(key) + ": " + e.what());
    }
  }

  for (const auto& [index, n] : nodes) {
    if (!n.serial) throw ValidationError("node." + std::to_string(index) + ".serial", "missing");
    NodeConfig node;
    node.id = make_sensor_id(n.family, *n.serial);
    std::uint64_t trace_seed = config.seed ^ (*n.serial * 0x9E3779B97F4A7C15ull);
    try {
      node.trace = parse_trace(n.trace, splitmix64(trace_seed));
    } catch (const std::invalid_argument& e) {
      throw ParseError(origin, n.trace_line ? n.trace_line : n.line, "node." + std::to_string(index) + ".trace: " + e.what());
    }
    node.distance_m = n.distance_m;
    node.phase_s = n.phase_s;
    config.nodes.push_back(std::move(node));
  }
  return config;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  auto config = parse_config(buf.str(), path.string());
  if (!(config.duration_s > 0)) throw ValidationError("scenario.duration_s", "must be > 0");
  validate(config);
  return config;
}

std::string config_reference() {
  ScenarioConfig d;
  const auto& dp = d.delay;
  const auto& pp = d.power;
  auto f = [](double v) { return format_double(v); };
  std::ostringstream o;
  o << "Scenario file: one `section.key = value` per line, `#` starts a comment.\n"
    << "Unknown or repeated keys are rejected.\n\n"
    << "  scenario.duration_s          " << f(d.duration_s) << "\n"
    << "  scenario.seed                " << d.seed << "\n"
    << "  scenario.sample_period_s     " << f(d.sample_period_s) << "\n"
    << "  scenario.range_m             " << f(d.range_m) << "\n"
    << "  scenario.mac_mode            tdma  (tdma | aloha)\n"
    << "  sensor.noise_sigma_c         " << f(d.noise_sigma_c) << "\n"
    << "  node.<i>.serial              required, 48-bit (decimal or 0x-hex)\n"
    << "  node.<i>.family              0x28\n"
    << "  node.<i>.trace               constant:37\n"
    << "      constant:C | ramp:C0,rate_per_s[,onset_s] | sinusoid:mean,amp,period_s[,phase]\n"
    << "      band:low,high[,hold_s[,seed]] | csv:path\n"
    << "  node.<i>.distance_m          10\n"
    << "  node.<i>.phase_s             0\n"
    << "  delay.mcu_clock_hz           " << f(dp.mcu_clock_hz) << "\n"
    << "  delay.mac_instruction_clocks " << f(dp.mac_instruction_clocks) << "\n"
    << "  delay.radio_switch_delay_s   " << f(dp.radio_switch_delay_s) << "\n"
    << "  delay.air_data_rate_bps      " << f(dp.air_data_rate_bps) << "\n"
    << "  delay.serial_rate_bps        " << f(dp.serial_rate_bps) << "\n"
    << "  delay.usb_rate_bps           " << f(dp.usb_rate_bps) << "\n"
    << "  delay.sensor_conversion_s    " << f(dp.sensor_conversion_s) << "\n"
    << "  delay.propagation_speed_mps  " << f(dp.propagation_speed_mps) << "\n"
    << "  delay.per_meter_penalty_s    " << f(dp.per_meter_penalty_s) << "\n"
    << "  power.supply_voltage_v       " << f(pp.supply_voltage_v) << "\n"
    << "  power.radio_i_transmit_a     " << f(pp.radio_i_transmit_a) << "\n"
    << "  power.radio_i_receive_a      " << f(pp.radio_i_receive_a) << "\n"
    << "  power.radio_i_idle_a         " << f(pp.radio_i_idle_a) << "\n"
    << "  power.sensor_i_active_a      " << f(pp.sensor_i_active_a) << "\n"
    << "  power.sensor_i_idle_a        " << f(pp.sensor_i_idle_a) << "\n"
    << "  power.mcu_i_active_a         " << f(pp.mcu_i_active_a) << "\n"
    << "  power.mcu_i_idle_a           " << f(pp.mcu_i_idle_a) << "\n"
    << "  power.battery_energy_budget_j " << f(pp.battery_energy_budget_j) << "\n"
    << "  power.battery_nameplate_w    " << f(pp.battery_nameplate_w) << "  (metadata)\n"
    << "  power.battery_initial_current_a " << f(pp.battery_initial_current_a) << "  (metadata)\n"
    << "  schedule.guard_s             " << f(d.guard_s) << "\n"
    << "  schedule.beacon_slot_s       " << f(d.beacon_slot_s) << "\n"
    << "  alert.high_threshold_c       " << f(d.alert.high_threshold_c) << "\n"
    << "  alert.rise_rate_c_per_min    " << f(d.alert.rise_rate_c_per_min) << "\n"
    << "  alert.rise_window_s          " << f(d.alert.rise_window_s) << "\n"
    << "  interferer.enabled           false\n"
    << "  interferer.offset_s          " << f(d.interferer.offset_s) << "\n"
    << "  interferer.period_s          " << f(d.interferer.period_s) << "\n"
    << "  interferer.burst_s           " << f(d.interferer.burst_s) << "\n"
    << "  interferer.distance_m        " << f(d.interferer.distance_m) << "\n";
  return o.str();
}

}  // namespace wbsn
