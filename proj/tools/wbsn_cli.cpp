// Command-line front end: run scenarios and generate delay/energy/schedule
// reports.

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "wbsn/commands.hpp"
#include "wbsn/config.hpp"

namespace {

using namespace wbsn;

std::optional<ScenarioConfig> load_or_report(const std::string& path) {
  try {
    if (path.empty()) return ScenarioConfig{};
    return load_config(path);
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  }
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wireless body-temperature sensor network simulator"};
  app.require_subcommand(1);
  app.footer("\n" + config_reference());

  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::string mac;
  std::vector<double> bits{64, 128, 256, 512, 1024};
  std::vector<double> distances{1, 10, 100};
  std::vector<long> reps{1, 10, 100};
  double period_s = 1.0;

  auto* simulate = app.add_subcommand("simulate", "Run a scenario and write CSV outputs");
  simulate->add_option("--config", config_path, "Scenario file")->required();
  simulate->add_option("--out", out_path, "Output directory")->required();
  simulate->add_option("--seed", seed, "Override scenario.seed");
  simulate->add_option("--mac", mac, "Override scenario.mac_mode")->check(CLI::IsMember({"tdma", "aloha"}));

  auto* report = app.add_subcommand("report", "Analytical reports");
  report->require_subcommand(1);

  auto* delay = report->add_subcommand("delay", "Per-stage latency over bits x distance");
  delay->add_option("--bits", bits, "Frame sizes in bits")->delimiter(',');
  delay->add_option("--distance", distances, "Distances in meters")->delimiter(',');
  delay->add_option("--config", config_path, "Take delay.* parameters from this scenario file");
  delay->add_option("--out", out_path, "Output CSV (default stdout)");

  auto* energy = report->add_subcommand("energy", "Radio energy over bits x repetitions");
  energy->add_option("--bits", bits, "Frame sizes in bits")->delimiter(',');
  energy->add_option("--reps", reps, "Repetition counts")->delimiter(',');
  energy->add_option("--period", period_s, "Seconds of experiment per repetition (idle window)")
      ->check(CLI::PositiveNumber);
  energy->add_option("--config", config_path, "Take delay.* and power.* parameters from this file");
  energy->add_option("--out", out_path, "Output CSV (default stdout)");

  auto* schedule = report->add_subcommand("schedule", "TDMA slot table of a scenario");
  schedule->add_option("--config", config_path, "Scenario file")->required();
  schedule->add_option("--out", out_path, "Output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  auto config = load_or_report(config_path);
  if (!config) return kExitConfigError;

  if (*simulate) {
    if (seed) config->seed = *seed;
    if (!mac.empty()) config->mac_mode = mac == "aloha" ? MacMode::aloha : MacMode::tdma;
    return cmd_simulate(*config, out_path, std::cerr);
  }
  try {
    if (*delay) {
      return emit(report_delay_csv(bits, distances, config->delay), out_path, std::cout, std::cerr);
    }
    if (*energy) {
      return emit(report_energy_csv(bits, reps, config->power, config->delay, period_s), out_path,
                  std::cout, std::cerr);
    }
    if (*schedule) return emit(report_schedule_csv(*config), out_path, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitOk;
}
