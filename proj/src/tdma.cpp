#include "wbsn/tdma.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace wbsn {

std::optional<std::size_t> SlotSchedule::slot_of(const SensorId& id) const {
  auto it = assignments.find(id);
  if (it == assignments.end()) return std::nullopt;
  return it->second;
}

double SlotSchedule::slot_offset(std::size_t index) const {
  return beacon_slot_s + static_cast<double>(index) * slot_duration_s;
}

SlotSchedule build_schedule(std::span<const SensorId> node_ids, double frame_bits,
                            const DelayParams& params, double guard_s, double beacon_slot_s) {
  if (node_ids.empty()) throw std::invalid_argument("schedule needs at least one node");
  if (guard_s < 0) throw std::invalid_argument("guard must be non-negative");
  if (!(beacon_slot_s > 0)) throw std::invalid_argument("beacon slot must be positive");

  std::vector<SensorId> ordered(node_ids.begin(), node_ids.end());
  std::sort(ordered.begin(), ordered.end());
  if (auto dup = std::adjacent_find(ordered.begin(), ordered.end()); dup != ordered.end())
    throw DuplicateNode("node " + to_hex(*dup) + " listed more than once");
  // Equal serials under different family codes would still be ambiguous on
  // the roster.
  std::set<std::uint64_t> serials;
  for (const auto& id : ordered)
    if (!serials.insert(id.serial).second)
      throw DuplicateNode("serial of node " + to_hex(id) + " listed more than once");

  double needed = airtime(frame_bits, params) + 2.0 * params.radio_switch_delay_s + guard_s;
  double ticks = std::ceil(needed / kSlotGranularityS - 1e-9);

  SlotSchedule s;
  s.beacon_slot_s = beacon_slot_s;
  s.slot_duration_s = std::max(1.0, ticks) * kSlotGranularityS;
  s.guard_s = guard_s;
  s.slot_order = ordered;
  for (std::size_t i = 0; i < ordered.size(); ++i) s.assignments.emplace(ordered[i], i);
  s.frame_period_s = beacon_slot_s + static_cast<double>(ordered.size()) * s.slot_duration_s;
  return s;
}

std::optional<SensorId> slot_owner(const SlotSchedule& schedule, double t) {
  if (schedule.slot_order.empty()) return std::nullopt;
  double phase = std::fmod(t + 1e-12, schedule.frame_period_s);
  if (phase < schedule.beacon_slot_s) return std::nullopt;
  auto index = static_cast<std::size_t>((phase - schedule.beacon_slot_s) / schedule.slot_duration_s);
  index = std::min(index, schedule.slot_order.size() - 1);
  return schedule.slot_order[index];
}

double next_slot_start(const SlotSchedule& schedule, std::size_t slot_index,
                       double frame_reference_s, double earliest) {
  double first = frame_reference_s + schedule.slot_offset(slot_index);
  if (earliest <= first + kTimeEpsilonS) return first;
  double frames = std::ceil((earliest - first) / schedule.frame_period_s - 1e-9);
  return first + frames * schedule.frame_period_s;
}

namespace {

MacStep decide(MacState s, bool busy, const SlotSchedule& schedule) {
  if (busy) {
    s.phase = MacPhase::waiting_slot;
    s.next_slot_start_s += schedule.frame_period_s;
    ++s.retry_count;
    return {s, MacAction::defer_to_next_frame};
  }
  s.phase = MacPhase::transmitting;
  return {s, MacAction::start_tx};
}

}  // namespace

MacStep mac_step(const MacState& state, double now, std::optional<bool> rssi_busy,
                 const SlotSchedule& schedule) {
  MacState s = state;
  switch (s.phase) {
    case MacPhase::unsynced:
    case MacPhase::transmitting:
    case MacPhase::done:
      return {s, MacAction::none};

    case MacPhase::waiting_slot: {
      if (!s.pending_frame) {
        s.phase = MacPhase::done;
        return {s, MacAction::none};
      }
      if (now + kTimeEpsilonS < s.next_slot_start_s) return {s, MacAction::none};
      if (now > s.next_slot_start_s + kTimeEpsilonS) {
        // Own slot start already passed: wait for the next one.
        if (auto idx = schedule.slot_of(s.self)) {
          s.next_slot_start_s = next_slot_start(schedule, *idx,
                                                s.next_slot_start_s - schedule.slot_offset(*idx), now);
        }
        if (now + kTimeEpsilonS < s.next_slot_start_s) return {s, MacAction::none};
      }
      if (!rssi_busy) {
        s.phase = MacPhase::sensing_channel;
        return {s, MacAction::start_rssi};
      }
      return decide(s, *rssi_busy, schedule);
    }

    case MacPhase::sensing_channel:
      if (!s.pending_frame) {
        s.phase = MacPhase::done;
        return {s, MacAction::none};
      }
      if (!rssi_busy) return {s, MacAction::none};
      return decide(s, *rssi_busy, schedule);
  }
  return {s, MacAction::none};
}

MacState synchronize(const MacState& state, double beacon_time_s, const SlotSchedule& schedule) {
  auto idx = schedule.slot_of(state.self);
  if (!idx) return state;
  MacState s = state;
  if (s.phase == MacPhase::transmitting) return s;
  s.next_slot_start_s = beacon_time_s + schedule.slot_offset(*idx);
  s.phase = s.pending_frame ? MacPhase::waiting_slot : MacPhase::done;
  return s;
}

MacState enqueue_frame(const MacState& state, const FrameWord& frame) {
  MacState s = state;
  s.pending_frame = frame;
  s.retry_count = 0;
  if (s.phase != MacPhase::unsynced) s.phase = MacPhase::waiting_slot;
  return s;
}

MacState complete_transmission(const MacState& state) {
  MacState s = state;
  s.pending_frame.reset();
  s.phase = MacPhase::done;
  return s;
}

}  // namespace wbsn
