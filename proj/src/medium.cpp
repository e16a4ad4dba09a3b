#include "wbsn/medium.hpp"

#include <stdexcept>

namespace wbsn {
namespace {

Delivery window_of(const Transmission& tx, const DelayParams& params) {
  double prop = propagation_delay(tx.distance_m, params);
  return {DeliveryKind::delivered, tx.start_s + prop, tx.end_s + prop};
}

bool overlaps(const Delivery& a, const Delivery& b) {
  return a.arrival_start_s < b.arrival_end_s && b.arrival_start_s < a.arrival_end_s;
}

}  // namespace

Medium::TxId Medium::add(const Transmission& tx) {
  if (!(tx.end_s > tx.start_s)) throw std::invalid_argument("transmission must have positive length");
  auto id = next_id_++;
  active_.emplace(id, tx);
  return id;
}

Delivery Medium::arrival(const Transmission& tx) const { return window_of(tx, params_); }

Delivery Medium::outcome(TxId id) const {
  const auto& tx = active_.at(id);
  Delivery d = window_of(tx, params_);
  if (!in_range(tx.distance_m)) {
    d.kind = DeliveryKind::out_of_range;
    return d;
  }
  for (const auto& [other_id, other] : active_) {
    if (other_id == id || !in_range(other.distance_m)) continue;
    if (overlaps(d, window_of(other, params_))) {
      d.kind = DeliveryKind::collided;
      break;
    }
  }
  return d;
}

bool Medium::busy_at(double t) const {
  for (const auto& [id, tx] : active_)
    if (in_range(tx.distance_m) && tx.start_s <= t && t < tx.end_s) return true;
  return false;
}

void Medium::prune(double t) {
  for (auto it = active_.begin(); it != active_.end();) {
    if (window_of(it->second, params_).arrival_end_s < t)
      it = active_.erase(it);
    else
      ++it;
  }
}

Delivery medium_transmit(const std::vector<Transmission>& others, const Transmission& tx,
                         double range_m, const DelayParams& params) {
  Medium m(range_m, params);
  auto id = m.add(tx);
  for (const auto& o : others) m.add(o);
  return m.outcome(id);
}

}  // namespace wbsn
