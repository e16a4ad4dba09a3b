// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "support.hpp"
#include "wbsn/commands.hpp"
#include "wbsn/config.hpp"
#include "wbsn/delay.hpp"
#include "wbsn/energy.hpp"
#include "wbsn/ident.hpp"
#include "wbsn/monitor.hpp"
#include "wbsn/simulator.hpp"

using namespace wbsn;

namespace {

struct Check {
  bool ok = true;
  std::string note;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) note = what;
    ok = ok && cond;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::filesystem::path shipped(const char* name) {
  return std::filesystem::path(WBSN_SOURCE_DIR) / "configs" / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Check mcu_prep() {
  Check c;
  auto t0 = Clock::now();
  double t1 = mcu_prep_delay(DelayParams{});
  double elapsed = seconds_since(t0);
  c.expect(std::abs(t1 - 39.5e-6) <= 1e-12, "T1 = " + num(t1));
  c.expect(elapsed < 1e-3, "took " + num(elapsed) + " s");
  c.note = c.ok ? "T1 = " + num(t1) + " s" : c.note;
  return c;
}

Check frame_airtime() {
  Check c;
  double t = airtime(256, DelayParams{});
  c.expect(std::abs(t - 256.0 / 19200.0) <= 1e-12, "airtime = " + num(t));
  c.expect(std::abs(t - 0.013333333333333) <= 1e-12, "airtime = " + num(t));
  c.note = c.ok ? "airtime = " + num(t) + " s" : c.note;
  return c;
}

Check budget_composition() {
  Check c;
  DelayParams p;
  auto b = total_delay(256, 10, p);
  double sum = 0;
  for (double t : b.terms) sum += t;
  c.expect(sum == b.total, "stored total differs from the sum of its terms");
  double oracle = 316 / 8e6 + 130e-6 + 10 / 2.998e8 + 256 / 19200.0 + 130e-6 + 256 / 19200.0 + 0.75 +
                  256 / 12e6;
  c.expect(std::abs(b.total - oracle) <= 1e-12, "total " + num(b.total) + " vs " + num(oracle));
  c.expect(std::abs(b.total - 0.77699) <= 5e-6, "total " + num(b.total));
  c.expect(b.t(7) == 0.75 && b.t(7) > b.total / 2, "T7 does not dominate");
  c.note = c.ok ? "total = " + num(b.total) + " s, T7 = " + num(b.t(7)) + " s" : c.note;
  return c;
}

Check delay_trends() {
  Check c;
  DelayParams p;
  const double bits[] = {64, 128, 256, 512, 1024};
  double y[5];
  for (int i = 0; i < 5; ++i) y[i] = total_delay(bits[i], 10, p).total;
  for (int i = 1; i < 5; ++i) c.expect(y[i] > y[i - 1], "not strictly increasing in bits");
  // Least-squares slope and residuals.
  double mx = 0, my = 0;
  for (int i = 0; i < 5; ++i) mx += bits[i] / 5, my += y[i] / 5;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 5; ++i) sxy += (bits[i] - mx) * (y[i] - my), sxx += (bits[i] - mx) * (bits[i] - mx);
  double slope = sxy / sxx;
  double expected = 1 / 19200.0 + 1 / 19200.0 + 1 / 12e6;
  c.expect(std::abs(slope - expected) <= 1e-9, "slope " + num(slope));
  for (int i = 0; i < 5; ++i)
    c.expect(std::abs(y[i] - (my + slope * (bits[i] - mx))) <= 1e-12, "not affine");
  double prev = 0;
  for (double d = 0; d <= 2000; d += 25) {
    double t = total_delay(256, d, p).total;
    c.expect(t >= prev, "decreasing in distance at " + num(d));
    prev = t;
  }
  c.note = c.ok ? "slope = " + num(slope) + " s/bit" : c.note;
  return c;
}

Check energy_model() {
  Check c;
  DevicePowerProfile p;
  DelayParams d;
  double tx = state_energy(p, Device::radio, PowerState::transmit, airtime(256, d));
  c.expect(std::abs(tx - 9 * 0.016 * (256 / 19200.0)) <= 1e-9, "tx energy " + num(tx));
  c.expect(std::abs(tx - 1.92e-3) <= 1e-9, "tx energy " + num(tx));
  double p_rx = power(p.supply_voltage_v, p.radio_i_receive_a);
  double p_tx = power(p.supply_voltage_v, p.radio_i_transmit_a);
  c.expect(std::abs(p_rx - 0.324) <= 1e-12 && std::abs(p_tx - 0.144) <= 1e-12, "power levels");
  c.expect(p_rx > p_tx, "receive power not above transmit");

  const double bits[] = {64, 128, 256, 512, 1024};
  const long reps[] = {1, 2, 5, 10, 50, 100};
  auto rows = energy_sweep(bits, reps, p, d);
  for (const auto& a : rows)
    for (const auto& b : rows)
      if (a.bits <= b.bits && a.repetitions <= b.repetitions)
        c.expect(a.e_tx_j <= b.e_tx_j && a.e_rx_j <= b.e_rx_j && a.e_idle_j <= b.e_idle_j &&
                     a.e_total_j <= b.e_total_j,
                 "sweep column decreases");
  c.note = c.ok ? "E_tx(256 bits) = " + num(tx) + " J" : c.note;
  return c;
}

Check scenario_one() {
  Check c;
  auto config = load_config(shipped("wrist_single.conf"));
  auto t0 = Clock::now();
  auto r = run_scenario(config);
  double elapsed = seconds_since(t0);
  c.expect(r.readings.size() == 60, num(static_cast<double>(r.readings.size())) + " readings");
  for (const auto& reading : r.readings)
    c.expect(reading.temp_c >= 26 - kTempResolutionC && reading.temp_c <= 30 + kTempResolutionC,
             "reading " + num(reading.temp_c) + " outside band");
  c.expect(elapsed < 1.0, "took " + num(elapsed) + " s");
  c.note = c.ok ? "60 readings in [26, 30] C, " + num(elapsed * 1e3) + " ms" : c.note;
  return c;
}

Check scenario_two() {
  Check c;
  auto config = load_config(shipped("two_objects.conf"));
  auto r = run_scenario(config);
  std::set<SensorId> roster;
  for (const auto& n : config.nodes) roster.insert(n.id);
  MonitorStore store(roster);
  for (const auto& reading : r.readings) store.ingest(reading);
  auto snap = store.snapshot();
  c.expect(config.nodes.size() == 2 && snap.series.size() == 2, "expected two series");
  for (const auto& n : config.nodes) {
    auto it = snap.series.find(n.id);
    if (it == snap.series.end()) {
      c.expect(false, "missing series");
      continue;
    }
    c.expect(it->second.size() == 60, "series length " + num(static_cast<double>(it->second.size())));
    double truth = n.trace.at(0);
    for (const auto& reading : it->second) {
      c.expect(reading.sensor_id == n.id, "foreign id in series");
      c.expect(std::abs(reading.temp_c - truth) < 0.5, "reading from the other object");
    }
  }
  c.expect(r.counters.collisions == 0, "collisions");
  c.note = c.ok ? "two series of 60, 0 collisions" : c.note;
  return c;
}

Check collision_freedom() {
  Check c;
  for (std::size_t n : {1u, 2u, 4u, 8u, 16u}) {
    auto config = fixtures::scenario(n, 300, n);
    auto r = run_scenario(config);
    c.expect(r.counters.collisions == 0, "N=" + num(static_cast<double>(n)) + " collided");
    c.expect(r.readings.size() == 300 * n, "N=" + num(static_cast<double>(n)) + " lost readings");
  }
  auto aloha = fixtures::scenario(2, 10);
  aloha.mac_mode = MacMode::aloha;
  auto r = run_scenario(aloha);
  c.expect(r.counters.collisions >= 1, "aloha produced no collision");
  c.note = c.ok ? "TDMA 0 collisions for N<=16; aloha N=2: " +
                      num(static_cast<double>(r.counters.collisions)) + " collisions"
                : c.note;
  return c;
}

Check ledger_conservation() {
  Check c;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    auto config = fixtures::scenario(1 + seed % 4, 60, seed, "band:35,39");
    config.noise_sigma_c = 0.1;
    config.interferer.enabled = seed % 2 == 0;
    config.interferer.offset_s = 0.78;
    config.interferer.period_s = 1.7;
    config.interferer.burst_s = 0.03;
    if (seed == 7) {
      config.mac_mode = MacMode::aloha;
      config.interferer.enabled = false;
    }
    auto r = run_scenario(config);
    auto oracle = fixtures::energy_from_events(r, config);
    for (const auto& [id, ledger] : r.node_ledgers) {
      double err = std::abs(ledger.total_j - oracle.at(to_hex(id)));
      worst = std::max(worst, err);
    }
  }
  c.expect(worst <= 1e-9, "max deviation " + num(worst) + " J");
  c.note = c.ok ? "max deviation " + num(worst) + " J" : c.note;
  return c;
}

Check crc_and_flips() {
  Check c;
  std::string check = "123456789";
  auto v = crc8({reinterpret_cast<const std::uint8_t*>(check.data()), check.size()});
  c.expect(v == 0xA1, "crc8 check value " + num(v));
  std::mt19937_64 gen(2024);
  std::size_t flips = 0;
  for (int round = 0; round < 64; ++round) {
    auto id = make_sensor_id(kDs18b20Family, gen() & kSerialMask);
    auto word = encode_frame(id, static_cast<std::int16_t>(gen()), static_cast<std::uint16_t>(gen()));
    for (std::size_t bit = 8 * frame_layout::kSensorId; bit < 8 * frame_layout::kPadding; ++bit) {
      auto bad = word;
      bad[bit / 8] ^= static_cast<std::uint8_t>(0x80 >> (bit % 8));
      c.expect(!decode_frame(bad), "flip of bit " + num(static_cast<double>(bit)) + " accepted");
      ++flips;
    }
  }
  c.note = c.ok ? "crc8 = 0xA1, " + num(static_cast<double>(flips)) + " single-bit flips rejected" : c.note;
  return c;
}

Check agreement_bound() {
  Check c;
  auto exact = fixtures::scenario(1, 120, 1, "constant:36.53");
  exact.noise_sigma_c = 0;
  auto r0 = run_scenario(exact);
  auto s0 = agreement(r0.readings, exact.nodes[0].trace);
  c.expect(s0.mae_c <= 0.03125, "zero-noise MAE " + num(s0.mae_c));

  const double sigma = 0.1;
  auto noisy = fixtures::scenario(1, 1200, 17, "constant:36.53");
  noisy.noise_sigma_c = sigma;
  auto r1 = run_scenario(noisy);
  c.expect(r1.readings.size() >= 1000, "too few samples");
  double truth = noisy.nodes[0].trace.at(0);
  double sum = 0, sq = 0;
  for (const auto& reading : r1.readings) {
    double e = std::abs(reading.temp_c - truth);
    sum += e;
    sq += e * e;
  }
  double n = static_cast<double>(r1.readings.size());
  double mae = sum / n;
  double se = std::sqrt((sq / n - mae * mae) / (n - 1));

  // Monte-Carlo estimate of E|Q(truth + noise) - truth| with an unrelated generator.
  std::mt19937_64 gen(123456789);
  std::normal_distribution<double> z(0.0, sigma);
  double mc = 0;
  const int draws = 2'000'000;
  for (int i = 0; i < draws; ++i)
    mc += std::abs(std::round((truth + z(gen)) / kTempResolutionC) * kTempResolutionC - truth);
  mc /= draws;

  double bound = sigma * std::sqrt(2 / std::acos(-1.0)) + kTempResolutionC / 2;
  c.expect(mae <= bound + 3 * se, "MAE " + num(mae) + " above bound " + num(bound));
  c.expect(std::abs(mae - mc) <= 3 * se, "MAE " + num(mae) + " vs Monte-Carlo " + num(mc));
  c.note = c.ok ? "zero-noise MAE " + num(s0.mae_c) + "; sigma 0.1 MAE " + num(mae) + " (MC " + num(mc) +
                      ", SE " + num(se) + ", bound " + num(bound) + ")"
                : c.note;
  return c;
}

Check determinism() {
  Check c;
  auto config = load_config(shipped("two_objects.conf"));
  config.noise_sigma_c = 0.1;
  auto dir = fixtures::scratch_dir("acceptance_determinism");
  std::ostringstream diag;
  c.expect(cmd_simulate(config, dir / "a", diag) == kExitOk, "first run failed");
  c.expect(cmd_simulate(config, dir / "b", diag) == kExitOk, "second run failed");
  for (const char* f : {"readings.csv", "alerts.csv", "events.csv"}) {
    auto a = slurp(dir / "a" / f);
    c.expect(!a.empty() && a == slurp(dir / "b" / f), std::string(f) + " differs");
  }
  c.note = c.ok ? "readings, alerts and events byte-identical" : c.note;
  return c;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Check()>> criteria[] = {
      {"MCU preparation delay", mcu_prep},
      {"frame airtime", frame_airtime},
      {"delay budget composition", budget_composition},
      {"delay trends in bits and distance", delay_trends},
      {"radio energy and sweep monotonicity", energy_model},
      {"single-node band scenario", scenario_one},
      {"two-object partition", scenario_two},
      {"TDMA collision freedom / aloha contrast", collision_freedom},
      {"energy ledger conservation", ledger_conservation},
      {"CRC check value and bit-flip rejection", crc_and_flips},
      {"measurement agreement", agreement_bound},
      {"determinism", determinism},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Check result;
    try {
      result = run();
    } catch (const std::exception& e) {
      result.ok = false;
      result.note = std::string("exception: ") + e.what();
    }
    std::printf("%s  %2d  %-42s %s\n", result.ok ? "PASS" : "FAIL", index, name, result.note.c_str());
    failed += result.ok ? 0 : 1;
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
