#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "wbsn/delay.hpp"
#include "wbsn/ident.hpp"

namespace wbsn {

inline constexpr double kDefaultGuardS = 0.005;
inline constexpr double kDefaultBeaconSlotS = 0.002;
inline constexpr double kSlotGranularityS = 0.001;
// Tolerance used when comparing event times against slot boundaries.
inline constexpr double kTimeEpsilonS = 1e-9;

class DuplicateNode : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One beacon slot followed by one data slot per node, repeating every
/// frame_period_s.
struct SlotSchedule {
  double frame_period_s = 0;
  double beacon_slot_s = 0;
  double slot_duration_s = 0;
  double guard_s = 0;
  std::map<SensorId, std::size_t> assignments;
  std::vector<SensorId> slot_order;  // inverse of assignments

  std::size_t slot_count() const { return slot_order.size(); }
  std::optional<std::size_t> slot_of(const SensorId& id) const;
  /// Offset of a slot's start from the frame (beacon) start.
  double slot_offset(std::size_t index) const;
};

/// Slots are assigned in ascending ROM-serial order; the slot length is the
/// frame airtime plus both radio switches plus guard, rounded up to 1 ms.
SlotSchedule build_schedule(std::span<const SensorId> node_ids, double frame_bits,
                            const DelayParams& params, double guard_s = kDefaultGuardS,
                            double beacon_slot_s = kDefaultBeaconSlotS);

/// Node owning the slot containing `t`, or nullopt inside the beacon slot.
std::optional<SensorId> slot_owner(const SlotSchedule& schedule, double t);

/// Start of the first slot owned by `slot_index` at or after `earliest`, given
/// that a frame started at `frame_reference_s`.
double next_slot_start(const SlotSchedule& schedule, std::size_t slot_index,
                       double frame_reference_s, double earliest);

enum class MacPhase { unsynced, waiting_slot, sensing_channel, transmitting, done };
enum class MacAction { none, start_rssi, start_tx, defer_to_next_frame };

struct MacState {
  SensorId self;
  MacPhase phase = MacPhase::unsynced;
  std::optional<FrameWord> pending_frame;
  double next_slot_start_s = 0;
  unsigned retry_count = 0;

  bool operator==(const MacState&) const = default;
};

struct MacStep {
  MacState state;
  MacAction action = MacAction::none;
};

/// One transition of the node's TDMA loop.
///
/// `rssi_busy` is the carrier-sense sample taken at `now`, or nullopt when
/// the radio has not sampled the channel at this instant. In waiting_slot at
/// the node's own slot start, an empty sample asks the radio for one
/// (start_rssi, phase sensing_channel); a present sample is acted on
/// directly. Free channel -> start_tx; busy -> defer to the same slot of the
/// next frame with retry_count + 1. Without a pending frame the node is done.
MacStep mac_step(const MacState& state, double now, std::optional<bool> rssi_busy,
                 const SlotSchedule& schedule);

/// Beacon received at `beacon_time_s`: align to this frame's own slot.
MacState synchronize(const MacState& state, double beacon_time_s, const SlotSchedule& schedule);

/// Hands a freshly prepared frame to the MAC.
MacState enqueue_frame(const MacState& state, const FrameWord& frame);

/// Transmission finished; the pending frame is released.
MacState complete_transmission(const MacState& state);

}  // namespace wbsn
