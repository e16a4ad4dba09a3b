#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace wbsn {

/// xoshiro256** seeded through splitmix64. The only generator used for
/// simulation randomness, so streams are reproducible from the scenario seed.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) noexcept;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform() noexcept;
  /// Standard normal via Box-Muller (one variate per call, the sine branch
  /// is discarded).
  double normal() noexcept;

 private:
  std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Ground-truth temperature as a function of time (seconds -> degrees C).
struct ConstantTrace {
  double value_c = 0;
};

/// start_c until onset_s, then rising at rate_c_per_s.
struct RampTrace {
  double start_c = 0;
  double rate_c_per_s = 0;
  double onset_s = 0;
};

struct SinusoidTrace {
  double mean_c = 0;
  double amplitude_c = 0;
  double period_s = 1;
  double phase_rad = 0;
};

/// Fluctuates inside [low_c, high_c]: uniform knots every hold_s, drawn from
/// a hash of (seed, knot index), joined linearly.
struct BandNoiseTrace {
  double low_c = 0;
  double high_c = 0;
  double hold_s = 1;
  std::uint64_t seed = 0;
};

/// Piecewise-linear through (t, temp) samples, held flat outside the range.
struct CsvTrace {
  std::string path;
  std::vector<std::pair<double, double>> points;
};

class TemperatureTrace {
 public:
  using Spec = std::variant<ConstantTrace, RampTrace, SinusoidTrace, BandNoiseTrace, CsvTrace>;

  TemperatureTrace() = default;
  explicit TemperatureTrace(Spec spec) : spec_(std::move(spec)) {}

  double at(double t) const;
  const Spec& spec() const { return spec_; }
  std::string describe() const;

 private:
  Spec spec_ = ConstantTrace{};
};

/// Parses `kind:arg,arg,...`, e.g. `constant:26`, `band:26,30`,
/// `ramp:36.5,0.0166,30`, `sinusoid:37,0.5,600`, `csv:trace.csv`.
/// `default_seed` feeds band traces that do not name a seed. Throws
/// std::invalid_argument with a short reason.
TemperatureTrace parse_trace(std::string_view text, std::uint64_t default_seed = 0);

std::vector<std::pair<double, double>> load_trace_points(const std::string& path);

}  // namespace wbsn
