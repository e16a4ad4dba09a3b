#pragma once

#include <cstddef>
#include <optional>

#include "wbsn/delay.hpp"
#include "wbsn/ident.hpp"

namespace wbsn {

/// Stage timestamps of one frame through the access point: radio switch,
/// RS232->USB converter, then the USB wire.
struct ForwardPlan {
  Frame frame;
  double arrival_s = 0;
  double serial_start_s = 0;  // arrival + rx switch
  double usb_start_s = 0;     // + serial delay
  double serial_out_s = 0;    // + usb delay
};

struct CorruptionCounts {
  std::size_t bad_preamble = 0;
  std::size_t bad_id_crc = 0;
  std::size_t bad_frame_crc = 0;

  std::size_t total() const { return bad_preamble + bad_id_crc + bad_frame_crc; }
};

/// Decodes and, if valid, plans the forwarding of a received frame. Corrupt
/// frames yield nullopt and bump the matching counter.
std::optional<ForwardPlan> access_point_forward(const FrameWord& word, double arrival_s,
                                                const DelayParams& params,
                                                CorruptionCounts* counts = nullptr);

}  // namespace wbsn
