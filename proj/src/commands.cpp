#include "wbsn/commands.hpp"

#include <fstream>
#include <ostream>
#include <set>

#include "wbsn/csv.hpp"
#include "wbsn/monitor.hpp"
#include "wbsn/simulator.hpp"

namespace wbsn {
namespace {

bool write_text(const std::filesystem::path& path, const std::string& body, std::ostream& diag) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (out) {
    out << body;
    out.flush();
  }
  if (!out) {
    diag << "error: cannot write " << path.string() << "\n";
    return false;
  }
  return true;
}

}  // namespace

int cmd_simulate(const ScenarioConfig& config, const std::filesystem::path& out_dir,
                 std::ostream& diag) {
  ScenarioResult result;
  try {
    result = run_scenario(config);
  } catch (const ValidationError& e) {
    diag << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    diag << "error: cannot create " << out_dir.string() << ": " << ec.message() << "\n";
    return kExitIoError;
  }

  std::set<SensorId> roster;
  for (const auto& n : config.nodes) roster.insert(n.id);
  MonitorStore store(roster);
  for (const auto& r : result.readings) store.ingest(r);
  auto snapshot = store.snapshot();

  std::vector<Alert> alerts;
  std::string agreement_body =
      csv_version_line("wbsn-agreement") + "\nsensor_id_hex,n,mae_c,max_err_c\n";
  for (const auto& n : config.nodes) {
    auto it = snapshot.series.find(n.id);
    if (it == snapshot.series.end() || it->second.empty()) {
      agreement_body += to_hex(n.id) + ",0,,\n";
      continue;
    }
    auto a = evaluate_alerts(it->second, config.alert);
    alerts.insert(alerts.end(), a.begin(), a.end());
    auto stats = agreement(it->second, n.trace);
    agreement_body += to_hex(n.id) + "," + std::to_string(stats.n) + "," + format_double(stats.mae_c) +
                      "," + format_double(stats.max_err_c) + "\n";
  }

  const auto& c = result.counters;
  std::string summary = csv_version_line("wbsn-summary") + "\nkey,value\n";
  auto put = [&](const char* k, const std::string& v) { summary += std::string(k) + "," + v + "\n"; };
  put("mac_mode", std::string(to_string(config.mac_mode)));
  put("seed", std::to_string(config.seed));
  put("end_time_s", format_double(result.end_time_s));
  put("samples", std::to_string(c.samples));
  put("transmissions", std::to_string(c.transmissions));
  put("deliveries", std::to_string(c.deliveries));
  put("collisions", std::to_string(c.collisions));
  put("out_of_range", std::to_string(c.out_of_range));
  put("deferrals", std::to_string(c.deferrals));
  put("dropped_frames", std::to_string(c.dropped_frames));
  put("unsynced_samples", std::to_string(c.unsynced_samples));
  put("corrupt_bad_preamble", std::to_string(c.corruption.bad_preamble));
  put("corrupt_bad_id_crc", std::to_string(c.corruption.bad_id_crc));
  put("corrupt_bad_frame_crc", std::to_string(c.corruption.bad_frame_crc));
  put("readings", std::to_string(result.readings.size()));
  put("duplicates", std::to_string(snapshot.counters.duplicates));
  put("unknown_sensor", std::to_string(snapshot.counters.unknown));
  put("alerts", std::to_string(alerts.size()));

  const std::pair<const char*, std::string> files[] = {
      {"events.csv", events_csv(result.events)},
      {"readings.csv", readings_csv(result.readings)},
      {"packets.csv", packets_csv(result.packets)},
      {"ledgers.csv", ledgers_csv(result)},
      {"alerts.csv", alerts_csv(alerts)},
      {"agreement.csv", agreement_body},
      {"summary.csv", summary},
  };
  for (const auto& [name, body] : files)
    if (!write_text(out_dir / name, body, diag)) return kExitIoError;

  try {
    export_store(snapshot, out_dir);
  } catch (const ExportError& e) {
    diag << "error: " << e.what() << "\n";
    return kExitIoError;
  }
  return kExitOk;
}

std::string report_delay_csv(std::span<const double> bits, std::span<const double> distances,
                             const DelayParams& params) {
  std::string out = csv_version_line("wbsn-delay") + "\nbits,distance_m";
  for (std::size_t s = 1; s <= DelayBudget::kTerms; ++s) out += ",t" + std::to_string(s);
  out += ",total_s\n";
  for (double b : bits) {
    for (double d : distances) {
      auto budget = total_delay(b, d, params);
      out += format_double(b) + "," + format_double(d);
      for (double t : budget.terms) out += "," + format_double(t);
      out += "," + format_double(budget.total) + "\n";
    }
  }
  return out;
}

std::string report_energy_csv(std::span<const double> bits, std::span<const long> reps,
                              const DevicePowerProfile& profile, const DelayParams& params,
                              double period_s) {
  std::string out = csv_version_line("wbsn-energy") +
                    "\nbits,repetitions,e_tx_j,e_rx_j,e_idle_j,e_total_j\n";
  for (const auto& r : energy_sweep(bits, reps, profile, params, period_s)) {
    out += format_double(r.bits) + "," + std::to_string(r.repetitions) + "," + format_double(r.e_tx_j) +
           "," + format_double(r.e_rx_j) + "," + format_double(r.e_idle_j) + "," +
           format_double(r.e_total_j) + "\n";
  }
  return out;
}

std::string report_schedule_csv(const ScenarioConfig& config) {
  auto s = schedule_for(config);
  std::string out = csv_version_line("wbsn-schedule") + "\n# frame_period_s=" +
                    format_double(s.frame_period_s) + " beacon_slot_s=" + format_double(s.beacon_slot_s) +
                    " slot_duration_s=" + format_double(s.slot_duration_s) +
                    "\nnode_id_hex,slot_index,slot_start_offset_s\n";
  for (std::size_t i = 0; i < s.slot_order.size(); ++i)
    out += to_hex(s.slot_order[i]) + "," + std::to_string(i) + "," + format_double(s.slot_offset(i)) + "\n";
  return out;
}

int emit(const std::string& body, const std::string& path, std::ostream& out, std::ostream& diag) {
  if (path.empty() || path == "-") {
    out << body;
    return kExitOk;
  }
  return write_text(path, body, diag) ? kExitOk : kExitIoError;
}

}  // namespace wbsn
