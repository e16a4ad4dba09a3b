#include "wbsn/trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "wbsn/csv.hpp"

namespace wbsn {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Xoshiro256::Xoshiro256(std::uint64_t seed) noexcept {
  for (auto& word : s_) word = splitmix64(seed);
}

Xoshiro256::result_type Xoshiro256::operator()() noexcept {
  auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256::uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double Xoshiro256::normal() noexcept {
  double u1 = 1.0 - uniform();  // (0, 1]
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

double knot_value(const BandNoiseTrace& b, std::int64_t index) {
  std::uint64_t state = b.seed ^ (static_cast<std::uint64_t>(index) * 0xD1B54A32D192ED03ull);
  double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
  return b.low_c + u * (b.high_c - b.low_c);
}

struct Evaluator {
  double t;
  double operator()(const ConstantTrace& c) const { return c.value_c; }
  double operator()(const RampTrace& r) const {
    return r.start_c + r.rate_c_per_s * std::max(0.0, t - r.onset_s);
  }
  double operator()(const SinusoidTrace& s) const {
    return s.mean_c + s.amplitude_c * std::sin(2.0 * std::numbers::pi * t / s.period_s + s.phase_rad);
  }
  double operator()(const BandNoiseTrace& b) const {
    double x = t / b.hold_s;
    auto i = static_cast<std::int64_t>(std::floor(x));
    double frac = x - static_cast<double>(i);
    double a = knot_value(b, i);
    double c = knot_value(b, i + 1);
    return std::clamp(a + frac * (c - a), b.low_c, b.high_c);
  }
  double operator()(const CsvTrace& c) const {
    const auto& pts = c.points;
    if (pts.empty()) return 0.0;
    if (t <= pts.front().first) return pts.front().second;
    if (t >= pts.back().first) return pts.back().second;
    auto hi = std::upper_bound(pts.begin(), pts.end(), t,
                               [](double v, const auto& p) { return v < p.first; });
    auto lo = hi - 1;
    double span = hi->first - lo->first;
    if (span <= 0) return hi->second;
    return lo->second + (t - lo->first) / span * (hi->second - lo->second);
  }
};

std::vector<double> parse_args(std::string_view args, std::string_view kind) {
  std::vector<double> out;
  if (args.empty()) return out;
  for (const auto& field : split(args, ',')) {
    auto v = parse_double(trim(field));
    if (!v) throw std::invalid_argument("trace " + std::string(kind) + ": bad number '" + field + "'");
    out.push_back(*v);
  }
  return out;
}

void need(std::string_view kind, const std::vector<double>& a, std::size_t lo, std::size_t hi) {
  if (a.size() < lo || a.size() > hi)
    throw std::invalid_argument("trace " + std::string(kind) + ": expected " + std::to_string(lo) +
                                (lo == hi ? "" : ".." + std::to_string(hi)) + " arguments");
}

}  // namespace

double TemperatureTrace::at(double t) const { return std::visit(Evaluator{t}, spec_); }

std::string TemperatureTrace::describe() const {
  struct Describe {
    std::string operator()(const ConstantTrace& c) const { return "constant:" + format_double(c.value_c); }
    std::string operator()(const RampTrace& r) const {
      return "ramp:" + format_double(r.start_c) + "," + format_double(r.rate_c_per_s) + "," +
             format_double(r.onset_s);
    }
    std::string operator()(const SinusoidTrace& s) const {
      return "sinusoid:" + format_double(s.mean_c) + "," + format_double(s.amplitude_c) + "," +
             format_double(s.period_s) + "," + format_double(s.phase_rad);
    }
    std::string operator()(const BandNoiseTrace& b) const {
      return "band:" + format_double(b.low_c) + "," + format_double(b.high_c) + "," +
             format_double(b.hold_s) + "," + std::to_string(b.seed);
    }
    std::string operator()(const CsvTrace& c) const { return "csv:" + c.path; }
  };
  return std::visit(Describe{}, spec_);
}

TemperatureTrace parse_trace(std::string_view text, std::uint64_t default_seed) {
  text = trim(text);
  auto colon = text.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("trace must look like kind:args");
  auto kind = trim(text.substr(0, colon));
  auto rest = trim(text.substr(colon + 1));

  if (kind == "csv") {
    if (rest.empty()) throw std::invalid_argument("trace csv: missing path");
    CsvTrace c{std::string(rest), load_trace_points(std::string(rest))};
    return TemperatureTrace(std::move(c));
  }
  auto a = parse_args(rest, kind);
  if (kind == "constant") {
    need(kind, a, 1, 1);
    return TemperatureTrace(ConstantTrace{a[0]});
  }
  if (kind == "ramp") {
    need(kind, a, 2, 3);
    return TemperatureTrace(RampTrace{a[0], a[1], a.size() > 2 ? a[2] : 0.0});
  }
  if (kind == "sinusoid") {
    need(kind, a, 3, 4);
    if (!(a[2] > 0)) throw std::invalid_argument("trace sinusoid: period must be positive");
    return TemperatureTrace(SinusoidTrace{a[0], a[1], a[2], a.size() > 3 ? a[3] : 0.0});
  }
  if (kind == "band" || kind == "band_noise") {
    need(kind, a, 2, 4);
    if (!(a[1] >= a[0])) throw std::invalid_argument("trace band: high below low");
    BandNoiseTrace b{a[0], a[1], a.size() > 2 ? a[2] : 1.0, default_seed};
    if (!(b.hold_s > 0)) throw std::invalid_argument("trace band: hold must be positive");
    if (a.size() > 3) {
      if (a[3] < 0 || a[3] != std::floor(a[3])) throw std::invalid_argument("trace band: bad seed");
      b.seed = static_cast<std::uint64_t>(a[3]);
    }
    return TemperatureTrace(b);
  }
  throw std::invalid_argument("unknown trace kind '" + std::string(kind) + "'");
}

std::vector<std::pair<double, double>> load_trace_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("trace csv: cannot open " + path);
  std::vector<std::pair<double, double>> pts;
  std::string line;
  while (std::getline(in, line)) {
    auto view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto cells = split(view, ',');
    if (cells.size() < 2) continue;
    auto t = parse_double(trim(cells[0]));
    auto v = parse_double(trim(cells[1]));
    if (!t || !v) continue;  // header row
    pts.emplace_back(*t, *v);
  }
  std::stable_sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first < b.first; });
  if (pts.empty()) throw std::invalid_argument("trace csv: no samples in " + path);
  return pts;
}

}  // namespace wbsn
