#include "wbsn/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wbsn/csv.hpp"

namespace wbsn {

Reading make_reading(const SensorId& id, double time_s, std::int16_t raw, std::uint16_t sequence,
                     double total_delay_s) {
  return Reading{id, time_s, raw_to_celsius(raw), raw, sequence, total_delay_s};
}

std::string AlertRule::invalid_field(double sampling_period_s) const {
  if (!(high_threshold_c > 0)) return "high_threshold_c";
  if (!(rise_rate_c_per_min > 0)) return "rise_rate_c_per_min";
  if (!(rise_window_s > 0) || rise_window_s < 2.0 * sampling_period_s) return "rise_window_s";
  return {};
}

std::string_view to_string(AlertKind k) noexcept {
  return k == AlertKind::high_temp ? "high_temp" : "rapid_rise";
}

namespace {

// Least-squares slope of temp over time for series[first, last].
std::optional<double> ls_slope(const std::vector<Reading>& s, std::size_t first, std::size_t last) {
  auto n = static_cast<double>(last - first + 1);
  double mt = 0, my = 0;
  for (auto i = first; i <= last; ++i) {
    mt += s[i].time_s;
    my += s[i].temp_c;
  }
  mt /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (auto i = first; i <= last; ++i) {
    double dt = s[i].time_s - mt;
    sxy += dt * (s[i].temp_c - my);
    sxx += dt * dt;
  }
  if (sxx <= 0) return std::nullopt;
  return sxy / sxx;
}

}  // namespace

std::vector<Alert> evaluate_alerts(const std::vector<Reading>& series, const AlertRule& rule) {
  std::vector<Alert> alerts;
  bool high_armed = true;
  bool rise_armed = true;
  std::size_t window_first = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& r = series[i];
    if (r.temp_c >= rule.high_threshold_c) {
      if (high_armed) alerts.push_back({AlertKind::high_temp, r.sensor_id, r.time_s, r.temp_c});
      high_armed = false;
    } else {
      high_armed = true;
    }

    while (series[window_first].time_s < r.time_s - rule.rise_window_s) ++window_first;
    std::size_t count = i - window_first + 1;
    double span = r.time_s - series[window_first].time_s;
    if (count < 3 || span < 0.5 * rule.rise_window_s) continue;
    auto slope = ls_slope(series, window_first, i);
    if (!slope) continue;
    double per_min = *slope * 60.0;
    if (per_min >= rule.rise_rate_c_per_min) {
      if (rise_armed) alerts.push_back({AlertKind::rapid_rise, r.sensor_id, r.time_s, per_min});
      rise_armed = false;
    } else {
      rise_armed = true;
    }
  }
  return alerts;
}

AgreementStats agreement(const std::vector<Reading>& series, const TemperatureTrace& truth) {
  if (series.empty()) throw EmptySeries("agreement needs at least one reading");
  AgreementStats stats;
  double sum = 0;
  for (const auto& r : series) {
    double err = std::abs(r.temp_c - truth.at(r.sample_time_s()));
    sum += err;
    stats.max_err_c = std::max(stats.max_err_c, err);
  }
  stats.n = series.size();
  stats.mae_c = sum / static_cast<double>(stats.n);
  return stats;
}

std::size_t StoreSnapshot::stored() const {
  std::size_t n = 0;
  for (const auto& [id, s] : series) n += s.size();
  return n;
}

MonitorStore::MonitorStore(MonitorStore&& other) noexcept {
  std::lock_guard lock(other.mu_);
  roster_ = std::move(other.roster_);
  sensors_ = std::move(other.sensors_);
  counters_ = other.counters_;
}

MonitorStore::IngestResult MonitorStore::ingest(const Reading& r) {
  std::lock_guard lock(mu_);
  ++counters_.ingested;
  if (!validate_sensor_id(r.sensor_id)) {
    ++counters_.invalid_id;
    return IngestResult::invalid_id;
  }
  if (roster_ && !roster_->contains(r.sensor_id)) {
    ++counters_.unknown;
    return IngestResult::unknown_sensor;
  }
  auto& s = sensors_[r.sensor_id];
  if (auto it = s.last_seen.find(r.sequence);
      it != s.last_seen.end() && s.ordinal - it->second < kDuplicateHorizon) {
    ++counters_.duplicates;
    return IngestResult::duplicate;
  }
  s.last_seen[r.sequence] = s.ordinal++;
  auto pos = std::upper_bound(s.readings.begin(), s.readings.end(), r.time_s,
                              [](double t, const Reading& x) { return t < x.time_s; });
  s.readings.insert(pos, r);
  return IngestResult::stored;
}

StoreSnapshot MonitorStore::snapshot() const {
  std::lock_guard lock(mu_);
  StoreSnapshot snap;
  for (const auto& [id, s] : sensors_) snap.series.emplace(id, s.readings);
  snap.counters = counters_;
  return snap;
}

std::vector<Reading> MonitorStore::series(const SensorId& id) const {
  std::lock_guard lock(mu_);
  auto it = sensors_.find(id);
  if (it == sensors_.end()) return {};
  return it->second.readings;
}

StoreCounters MonitorStore::counters() const {
  std::lock_guard lock(mu_);
  return counters_;
}

std::string readings_csv_header() {
  return "serial_out_time_s,sensor_id_hex,raw,temp_c,sequence,total_delay_s";
}

std::string reading_csv_row(const Reading& r) {
  return format_double(r.time_s) + "," + to_hex(r.sensor_id) + "," + std::to_string(r.raw) + "," +
         format_double(r.temp_c) + "," + std::to_string(r.sequence) + "," +
         format_double(r.total_delay_s);
}

std::optional<Reading> parse_reading_row(std::string_view line) {
  auto cells = split(trim(line), ',');
  if (cells.size() != 6) return std::nullopt;
  auto t = parse_double(cells[0]);
  auto id = sensor_id_from_hex(cells[1]);
  auto raw = parse_int(cells[2]);
  auto seq = parse_int(cells[4]);
  auto delay = parse_double(cells[5]);
  if (!t || !id || !raw || !seq || !delay) return std::nullopt;
  if (*raw < INT16_MIN || *raw > INT16_MAX || *seq < 0 || *seq > UINT16_MAX) return std::nullopt;
  return make_reading(*id, *t, static_cast<std::int16_t>(*raw), static_cast<std::uint16_t>(*seq),
                      *delay);
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ExportError("cannot open " + path.string() + " for writing");
  out << body;
  out.flush();
  if (!out) throw ExportError("write failed for " + path.string());
}

}  // namespace

std::vector<std::filesystem::path> export_store(const StoreSnapshot& snapshot,
                                                const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ExportError("cannot create " + dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  for (const auto& [id, series] : snapshot.series) {
    std::string body = csv_version_line("wbsn-readings") + "\n" + readings_csv_header() + "\n";
    for (const auto& r : series) body += reading_csv_row(r) + "\n";
    auto path = dir / ("readings_" + to_hex(id) + ".csv");
    write_file(path, body);
    written.push_back(path);
  }

  // One row per reading; cells for other sensors stay empty.
  struct Point {
    double t;
    std::size_t column;
    double temp;
  };
  std::vector<Point> points;
  std::string body = csv_version_line("wbsn-plot") + "\ntime_s";
  std::size_t column = 0;
  for (const auto& [id, series] : snapshot.series) {
    body += "," + to_hex(id);
    for (const auto& r : series) points.push_back({r.time_s, column, r.temp_c});
    ++column;
  }
  body += "\n";
  std::stable_sort(points.begin(), points.end(), [](auto& a, auto& b) { return a.t < b.t; });
  for (const auto& p : points) {
    body += format_double(p.t);
    for (std::size_t c = 0; c < column; ++c) {
      body += ",";
      if (c == p.column) body += format_double(p.temp);
    }
    body += "\n";
  }
  auto plot = dir / "plot.csv";
  write_file(plot, body);
  written.push_back(plot);
  return written;
}

MonitorStore import_store(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    auto name = entry.path().filename().string();
    if (name.starts_with("readings_") && name.ends_with(".csv")) files.push_back(entry.path());
  }
  if (ec) throw ExportError("cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());

  MonitorStore store;
  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in) throw ExportError("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      auto view = trim(line);
      if (view.empty() || view.front() == '#' || view == readings_csv_header()) continue;
      auto r = parse_reading_row(view);
      if (!r) throw ExportError(path.string() + ":" + std::to_string(line_no) + ": malformed row");
      store.ingest(*r);
    }
  }
  return store;
}

std::string alerts_csv(const std::vector<Alert>& alerts) {
  std::string body = csv_version_line("wbsn-alerts") + "\nkind,sensor_id_hex,time_s,value\n";
  for (const auto& a : alerts) {
    body += std::string(to_string(a.kind)) + "," + to_hex(a.sensor_id) + "," +
            format_double(a.trigger_time_s) + "," + format_double(a.value) + "\n";
  }
  return body;
}

}  // namespace wbsn
