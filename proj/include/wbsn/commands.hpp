#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "wbsn/config.hpp"
#include "wbsn/delay.hpp"
#include "wbsn/energy.hpp"

namespace wbsn {

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitConfigError = 1, kExitIoError = 2 };

/// Runs the scenario and writes into `out_dir`:
///   events.csv, readings.csv, packets.csv, ledgers.csv, alerts.csv,
///   agreement.csv, summary.csv, plus per-sensor readings_<id>.csv and plot.csv.
int cmd_simulate(const ScenarioConfig& config, const std::filesystem::path& out_dir,
                 std::ostream& diag);

std::string report_delay_csv(std::span<const double> bits, std::span<const double> distances,
                             const DelayParams& params);

std::string report_energy_csv(std::span<const double> bits, std::span<const long> reps,
                              const DevicePowerProfile& profile, const DelayParams& params,
                              double period_s);

std::string report_schedule_csv(const ScenarioConfig& config);

/// Writes `body` to `path`, or to `out` when `path` is empty or "-".
/// Returns kExitIoError (after a message on `diag`) if the file cannot be written.
int emit(const std::string& body, const std::string& path, std::ostream& out, std::ostream& diag);

}  // namespace wbsn
