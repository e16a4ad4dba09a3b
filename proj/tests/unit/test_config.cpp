#include <gtest/gtest.h>

#include <fstream>

#include "support.hpp"
#include "wbsn/config.hpp"

using namespace wbsn;

namespace {

std::size_t parse_error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(Config, ParsesKeys) {
  auto c = parse_config(
      "# comment\n"
      "scenario.duration_s = 30\n"
      "scenario.seed = 42\n"
      "scenario.mac_mode = aloha\n"
      "sensor.noise_sigma_c = 0.2   # trailing\n"
      "delay.per_meter_penalty_s = 1e-4\n"
      "power.supply_voltage_v = 3.3\n"
      "alert.high_threshold_c = 39\n"
      "interferer.enabled = true\n"
      "node.1.serial = 0x102\n"
      "node.0.serial = 257\n"
      "node.0.trace = ramp:36,0.01\n"
      "node.0.distance_m = 20\n"
      "node.1.phase_s = 0.5\n");
  EXPECT_EQ(c.duration_s, 30);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.mac_mode, MacMode::aloha);
  EXPECT_EQ(c.noise_sigma_c, 0.2);
  EXPECT_EQ(c.delay.per_meter_penalty_s, 1e-4);
  EXPECT_EQ(c.power.supply_voltage_v, 3.3);
  EXPECT_EQ(c.alert.high_threshold_c, 39);
  EXPECT_TRUE(c.interferer.enabled);
  ASSERT_EQ(c.nodes.size(), 2u);
  EXPECT_EQ(c.nodes[0].id.serial, 257u);
  EXPECT_EQ(c.nodes[0].id.family_code, kDs18b20Family);
  EXPECT_EQ(c.nodes[0].distance_m, 20);
  EXPECT_EQ(c.nodes[1].id.serial, 0x102u);
  EXPECT_EQ(c.nodes[1].phase_s, 0.5);
  EXPECT_NEAR(c.nodes[0].trace.at(100), 37, 1e-12);
}

TEST(Config, ParseErrorsCarryLine) {
  EXPECT_EQ(parse_error_line("scenario.seed = 1\nbogus.key = 2\n"), 2u);
  EXPECT_EQ(parse_error_line("\n\nscenario.seed\n"), 3u);
  EXPECT_EQ(parse_error_line("scenario.seed = 1\nscenario.seed = 2\n"), 2u);
  EXPECT_EQ(parse_error_line("scenario.duration_s = abc\n"), 1u);
  EXPECT_EQ(parse_error_line("node.0.serial = 1\nnode.0.trace = wobble:3\n"), 2u);
  EXPECT_EQ(parse_error_line("node.x.serial = 1\n"), 1u);
  EXPECT_EQ(parse_error_line("scenario.mac_mode = csma\n"), 1u);
}

TEST(Config, DuplicateSerialIsValidationError) {
  auto c = parse_config("node.0.serial = 5\nnode.1.serial = 5\n");
  try {
    validate(c);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "node.1.serial");
  }
}

TEST(Config, FieldInvariants) {
  auto base = fixtures::scenario(2, 10);
  EXPECT_NO_THROW(validate(base));

  auto c = base;
  c.sample_period_s = 0.01;
  EXPECT_THROW(validate(c), ValidationError);
  c = base;
  c.nodes.clear();
  EXPECT_THROW(validate(c), ValidationError);
  c = base;
  c.delay.air_data_rate_bps = -5;
  try {
    validate(c);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "delay.air_data_rate_bps");
  }
  c = base;
  c.alert.rise_window_s = 1;
  EXPECT_THROW(validate(c), ValidationError);
}

TEST(Config, LoadFile) {
  auto dir = fixtures::scratch_dir("config");
  EXPECT_THROW(load_config(dir / "missing.conf"), ParseError);

  std::ofstream(dir / "zero.conf") << "scenario.duration_s = 0\nnode.0.serial = 1\n";
  EXPECT_THROW(load_config(dir / "zero.conf"), ValidationError);

  std::ofstream(dir / "ok.conf") << "node.0.serial = 1\nnode.0.trace = band:26,30\n";
  auto c = load_config(dir / "ok.conf");
  EXPECT_EQ(c.nodes.size(), 1u);
  // Band traces are seeded from the scenario seed and serial.
  auto again = load_config(dir / "ok.conf");
  EXPECT_EQ(c.nodes[0].trace.at(12.3), again.nodes[0].trace.at(12.3));
}

TEST(Config, ReferenceListsEveryKey) {
  auto ref = config_reference();
  for (const char* key : {"scenario.duration_s", "node.<i>.serial", "delay.usb_rate_bps",
                          "power.battery_energy_budget_j", "schedule.guard_s", "alert.rise_window_s",
                          "interferer.burst_s"})
    EXPECT_NE(ref.find(key), std::string::npos) << key;
}

TEST(Config, ShippedConfigsLoad) {
  for (const char* name : {"wrist_single.conf", "two_objects.conf", "aloha_contrast.conf", "jammed.conf"})
    EXPECT_NO_THROW(load_config(std::filesystem::path(WBSN_SOURCE_DIR) / "configs" / name)) << name;
}
