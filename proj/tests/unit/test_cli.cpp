#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "support.hpp"
#include "wbsn/commands.hpp"
#include "wbsn/csv.hpp"

using namespace wbsn;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(WBSN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path config_file(const std::string& name) {
  return std::filesystem::path(WBSN_SOURCE_DIR) / "configs" / name;
}

}  // namespace

TEST(Commands, SimulateWritesOutputs) {
  auto dir = fixtures::scratch_dir("cli_sim");
  std::ostringstream diag;
  auto c = fixtures::scenario(2, 5);
  ASSERT_EQ(cmd_simulate(c, dir, diag), kExitOk) << diag.str();
  for (const char* f : {"events.csv", "readings.csv", "packets.csv", "ledgers.csv", "alerts.csv",
                        "agreement.csv", "summary.csv", "plot.csv"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  EXPECT_TRUE(std::filesystem::exists(dir / ("readings_" + to_hex(c.nodes[0].id) + ".csv")));
  EXPECT_NE(slurp(dir / "summary.csv").find("readings,10\n"), std::string::npos);
}

TEST(Commands, SimulateReportsBadConfigAndBadDirectory) {
  std::ostringstream diag;
  auto c = fixtures::scenario(1, 5);
  c.noise_sigma_c = -1;
  EXPECT_EQ(cmd_simulate(c, fixtures::scratch_dir("cli_bad"), diag), kExitConfigError);

  auto dir = fixtures::scratch_dir("cli_blocked");
  std::ofstream(dir / "file") << "x";
  EXPECT_EQ(cmd_simulate(fixtures::scenario(1, 2), dir / "file", diag), kExitIoError);
}

TEST(Commands, DelayReport) {
  const double bits[] = {64, 256};
  const double dist[] = {10};
  auto csv = report_delay_csv(bits, dist, {});
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# wbsn-delay v1");
  std::getline(in, line);
  EXPECT_EQ(line, "bits,distance_m,t1,t2,t3,t4,t5,t6,t7,t8,total_s");
  std::getline(in, line);
  std::getline(in, line);
  EXPECT_EQ(line.rfind("256,10,3.95e-05,", 0), 0u) << line;
}

TEST(Commands, EnergyReport) {
  const double bits[] = {256};
  const long reps[] = {1};
  auto csv = report_energy_csv(bits, reps, {}, {}, 1.0);
  auto header = csv.find("bits,repetitions,e_tx_j,e_rx_j,e_idle_j,e_total_j\n256,1,");
  ASSERT_NE(header, std::string::npos) << csv;
  auto row = csv.substr(csv.find("256,1,"));
  auto cells = split(trim(row), ',');
  ASSERT_EQ(cells.size(), 6u);
  EXPECT_NEAR(*parse_double(cells[2]), 1.92e-3, 1e-12);
  EXPECT_NEAR(*parse_double(cells[4]), 9e-6, 1e-15);
}

TEST(Commands, ScheduleReport) {
  auto csv = report_schedule_csv(fixtures::scenario(2, 5));
  EXPECT_NE(csv.find("slot_duration_s=0.019"), std::string::npos);
  auto row = csv.substr(csv.rfind(",1,") + 3);
  EXPECT_NEAR(*parse_double(trim(row)), 0.021, 1e-12) << csv;
}

TEST(Commands, EmitToUnwritablePath) {
  std::ostringstream out, diag;
  EXPECT_EQ(emit("x", "/nonexistent/dir/file.csv", out, diag), kExitIoError);
  EXPECT_EQ(emit("x", "", out, diag), kExitOk);
  EXPECT_EQ(out.str(), "x");
}

TEST(Cli, ExitCodes) {
  auto dir = fixtures::scratch_dir("cli_bin");
  EXPECT_EQ(run_cli("report delay --bits 64,256 --distance 1,10"), 0);
  EXPECT_EQ(run_cli("report energy --bits 256 --reps 1,10"), 0);
  EXPECT_EQ(run_cli("report schedule --config " + config_file("two_objects.conf").string()), 0);
  EXPECT_EQ(run_cli("simulate --config " + config_file("wrist_single.conf").string() + " --out " +
                    (dir / "run").string()),
            0);
  EXPECT_EQ(run_cli("simulate --config " + (dir / "missing.conf").string() + " --out " + dir.string()), 1);
  std::ofstream(dir / "bad.conf") << "scenario.nonsense = 1\n";
  EXPECT_EQ(run_cli("simulate --config " + (dir / "bad.conf").string() + " --out " + dir.string()), 1);
  std::ofstream(dir / "file") << "x";
  EXPECT_EQ(run_cli("simulate --config " + config_file("wrist_single.conf").string() + " --out " +
                    (dir / "file" / "sub").string()),
            2);
  EXPECT_EQ(run_cli("report delay --out " + (dir / "file" / "x.csv").string()), 2);
}

TEST(Cli, SeedOverrideIsDeterministic) {
  auto dir = fixtures::scratch_dir("cli_seed");
  auto conf = config_file("two_objects.conf").string();
  ASSERT_EQ(run_cli("simulate --config " + conf + " --seed 5 --out " + (dir / "a").string()), 0);
  ASSERT_EQ(run_cli("simulate --config " + conf + " --seed 5 --out " + (dir / "b").string()), 0);
  for (const char* f : {"events.csv", "readings.csv", "alerts.csv", "ledgers.csv"})
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
}
