#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "wbsn/delay.hpp"
#include "wbsn/ident.hpp"

namespace wbsn {

inline constexpr double kDefaultRadioRangeM = 100.0;

/// A signal on air. `distance_m` is the sender's distance to the access point.
struct Transmission {
  std::uint32_t sender = 0;
  double start_s = 0;
  double end_s = 0;
  FrameWord frame{};
  double distance_m = 0;
};

enum class DeliveryKind { delivered, collided, out_of_range };

struct Delivery {
  DeliveryKind kind = DeliveryKind::out_of_range;
  double arrival_start_s = 0;
  double arrival_end_s = 0;
};

/// Shared channel seen by the single access point receiver. Binary disk
/// range model, no capture: any overlap of two in-range arrivals at the
/// receiver destroys both.
class Medium {
 public:
  using TxId = std::uint64_t;

  Medium(double range_m, DelayParams params) : range_m_(range_m), params_(params) {}

  TxId add(const Transmission& tx);
  const Transmission& get(TxId id) const { return active_.at(id); }

  bool in_range(double distance_m) const { return distance_m <= range_m_; }

  /// Receiver-side window of a transmission (shifted by propagation).
  Delivery arrival(const Transmission& tx) const;

  /// Outcome at the receiver. Only meaningful once every transmission that
  /// could overlap has been added, i.e. at or after the arrival end.
  Delivery outcome(TxId id) const;

  /// Carrier sense at `t`: true when any in-range sender is on air.
  bool busy_at(double t) const;

  /// Forget transmissions whose arrival ended before `t`.
  void prune(double t);

  std::size_t size() const { return active_.size(); }

 private:
  double range_m_;
  DelayParams params_;
  TxId next_id_ = 0;
  std::map<TxId, Transmission> active_;
};

/// Stateless form: outcome of `tx` against the other transmissions on air.
Delivery medium_transmit(const std::vector<Transmission>& others, const Transmission& tx,
                         double range_m, const DelayParams& params);

}  // namespace wbsn
