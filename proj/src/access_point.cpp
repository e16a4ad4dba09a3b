#include "wbsn/access_point.hpp"

namespace wbsn {

std::optional<ForwardPlan> access_point_forward(const FrameWord& word, double arrival_s,
                                                const DelayParams& params,
                                                CorruptionCounts* counts) {
  auto decoded = decode_frame(word);
  if (!decoded) {
    if (counts) {
      switch (decoded.error) {
        case DecodeError::bad_preamble: ++counts->bad_preamble; break;
        case DecodeError::bad_id_crc: ++counts->bad_id_crc; break;
        case DecodeError::bad_frame_crc: ++counts->bad_frame_crc; break;
      }
    }
    return std::nullopt;
  }
  constexpr double bits = static_cast<double>(kFrameBits);
  ForwardPlan plan;
  plan.frame = *decoded.frame;
  plan.arrival_s = arrival_s;
  plan.serial_start_s = arrival_s + params.radio_switch_delay_s;
  plan.usb_start_s = plan.serial_start_s + serial_delay(bits, params);
  plan.serial_out_s = plan.usb_start_s + usb_delay(bits, params);
  return plan;
}

}  // namespace wbsn
