#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wbsn {

/// CRC-8/MAXIM (Dallas 1-Wire): poly x^8+x^5+x^4+1, reflected, init 0x00,
/// no final xor.
std::uint8_t crc8(std::span<const std::uint8_t> bytes) noexcept;

inline constexpr std::uint8_t kDs18b20Family = 0x28;
inline constexpr std::uint64_t kSerialMask = 0x0000FFFFFFFFFFFFull;

/// 64-bit 1-Wire ROM code. Byte order on the wire and in hex form is the ROM
/// order: family code, serial (least significant byte first), crc.
struct SensorId {
  std::uint8_t family_code = 0;
  std::uint64_t serial = 0;  // 48 significant bits
  std::uint8_t crc = 0;

  bool operator==(const SensorId&) const = default;
  // Serial first so schedules sort by ROM serial.
  std::strong_ordering operator<=>(const SensorId& o) const {
    if (auto c = serial <=> o.serial; c != 0) return c;
    if (auto c = family_code <=> o.family_code; c != 0) return c;
    return crc <=> o.crc;
  }
};

SensorId make_sensor_id(std::uint8_t family, std::uint64_t serial);
bool validate_sensor_id(const SensorId& id) noexcept;

std::array<std::uint8_t, 8> to_rom_bytes(const SensorId& id) noexcept;
SensorId from_rom_bytes(std::span<const std::uint8_t, 8> bytes) noexcept;

/// 16 lowercase hex chars in ROM byte order.
std::string to_hex(const SensorId& id);
std::optional<SensorId> sensor_id_from_hex(std::string_view hex);

class InvalidId : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Over-air frame
// ---------------------------------------------------------------------------

inline constexpr std::size_t kFrameBits = 256;
inline constexpr std::size_t kFrameBytes = kFrameBits / 8;
inline constexpr std::uint16_t kPreamble = 0xAA55;

/// Byte offsets inside the 32-byte frame (MSB-first bit numbering, so bit n
/// lives in byte n / 8).
namespace frame_layout {
inline constexpr std::size_t kPreamble = 0;
inline constexpr std::size_t kSensorId = 2;
inline constexpr std::size_t kRawTemp = 10;
inline constexpr std::size_t kSequence = 12;
inline constexpr std::size_t kFrameCrc = 14;
inline constexpr std::size_t kPadding = 15;
}  // namespace frame_layout

/// The 256-bit frame as a 32-byte big-endian octet string.
using FrameWord = std::array<std::uint8_t, kFrameBytes>;

struct Frame {
  SensorId sensor_id;
  std::int16_t raw_temp = 0;  // LSB = 0.0625 C
  std::uint16_t sequence = 0;
  std::uint8_t frame_crc = 0;

  bool operator==(const Frame&) const = default;
};

enum class DecodeError { bad_preamble, bad_id_crc, bad_frame_crc };

std::string_view to_string(DecodeError e) noexcept;

struct DecodeResult {
  std::optional<Frame> frame;
  DecodeError error = DecodeError::bad_preamble;  // meaningful only if !frame

  explicit operator bool() const noexcept { return frame.has_value(); }
};

/// Throws InvalidId if `id` fails validation.
FrameWord encode_frame(const SensorId& id, std::int16_t raw_temp, std::uint16_t sequence);

/// Checks preamble, then the embedded ROM crc, then the frame crc. Padding
/// bytes are not inspected.
DecodeResult decode_frame(const FrameWord& word) noexcept;

std::string to_hex(const FrameWord& word);
std::optional<FrameWord> frame_from_hex(std::string_view hex);

}  // namespace wbsn
