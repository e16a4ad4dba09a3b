#include "wbsn/ident.hpp"

#include <algorithm>
#include <charconv>

namespace wbsn {
namespace {

constexpr std::array<std::uint8_t, 256> make_crc8_table() {
  std::array<std::uint8_t, 256> table{};
  for (unsigned n = 0; n < 256; ++n) {
    std::uint8_t crc = static_cast<std::uint8_t>(n);
    for (int bit = 0; bit < 8; ++bit) {
      crc = (crc & 1u) ? static_cast<std::uint8_t>((crc >> 1) ^ 0x8Cu)
                       : static_cast<std::uint8_t>(crc >> 1);
    }
    table[n] = crc;
  }
  return table;
}

constexpr auto kCrc8Table = make_crc8_table();

constexpr char kHexDigits[] = "0123456789abcdef";

std::string bytes_to_hex(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0x0F]);
  }
  return out;
}

bool hex_to_bytes(std::string_view hex, std::span<std::uint8_t> out) {
  if (hex.size() != out.size() * 2) return false;
  for (std::size_t i = 0; i < out.size(); ++i) {
    unsigned value = 0;
    auto first = hex.data() + 2 * i;
    auto [ptr, ec] = std::from_chars(first, first + 2, value, 16);
    if (ec != std::errc{} || ptr != first + 2) return false;
    out[i] = static_cast<std::uint8_t>(value);
  }
  return true;
}

std::array<std::uint8_t, 7> rom_payload(std::uint8_t family, std::uint64_t serial) {
  std::array<std::uint8_t, 7> bytes{};
  bytes[0] = family;
  for (int i = 0; i < 6; ++i) bytes[1 + i] = static_cast<std::uint8_t>(serial >> (8 * i));
  return bytes;
}

}  // namespace

std::uint8_t crc8(std::span<const std::uint8_t> bytes) noexcept {
  std::uint8_t crc = 0;
  for (auto b : bytes) crc = kCrc8Table[crc ^ b];
  return crc;
}

SensorId make_sensor_id(std::uint8_t family, std::uint64_t serial) {
  serial &= kSerialMask;
  auto payload = rom_payload(family, serial);
  return SensorId{family, serial, crc8(payload)};
}

bool validate_sensor_id(const SensorId& id) noexcept {
  if ((id.serial & ~kSerialMask) != 0) return false;
  return crc8(rom_payload(id.family_code, id.serial)) == id.crc;
}

std::array<std::uint8_t, 8> to_rom_bytes(const SensorId& id) noexcept {
  std::array<std::uint8_t, 8> out{};
  auto payload = rom_payload(id.family_code, id.serial);
  std::copy(payload.begin(), payload.end(), out.begin());
  out[7] = id.crc;
  return out;
}

SensorId from_rom_bytes(std::span<const std::uint8_t, 8> bytes) noexcept {
  SensorId id;
  id.family_code = bytes[0];
  for (int i = 0; i < 6; ++i) id.serial |= std::uint64_t{bytes[1 + i]} << (8 * i);
  id.crc = bytes[7];
  return id;
}

std::string to_hex(const SensorId& id) {
  auto bytes = to_rom_bytes(id);
  return bytes_to_hex(bytes);
}

std::optional<SensorId> sensor_id_from_hex(std::string_view hex) {
  std::array<std::uint8_t, 8> bytes{};
  if (!hex_to_bytes(hex, bytes)) return std::nullopt;
  return from_rom_bytes(bytes);
}

std::string_view to_string(DecodeError e) noexcept {
  switch (e) {
    case DecodeError::bad_preamble: return "bad_preamble";
    case DecodeError::bad_id_crc: return "bad_id_crc";
    case DecodeError::bad_frame_crc: return "bad_frame_crc";
  }
  return "unknown";
}

FrameWord encode_frame(const SensorId& id, std::int16_t raw_temp, std::uint16_t sequence) {
  if (!validate_sensor_id(id)) throw InvalidId("sensor id " + to_hex(id) + " fails crc check");

  namespace L = frame_layout;
  FrameWord word{};
  word[L::kPreamble] = static_cast<std::uint8_t>(kPreamble >> 8);
  word[L::kPreamble + 1] = static_cast<std::uint8_t>(kPreamble & 0xFF);
  auto rom = to_rom_bytes(id);
  std::copy(rom.begin(), rom.end(), word.begin() + L::kSensorId);
  auto raw = static_cast<std::uint16_t>(raw_temp);
  word[L::kRawTemp] = static_cast<std::uint8_t>(raw >> 8);
  word[L::kRawTemp + 1] = static_cast<std::uint8_t>(raw & 0xFF);
  word[L::kSequence] = static_cast<std::uint8_t>(sequence >> 8);
  word[L::kSequence + 1] = static_cast<std::uint8_t>(sequence & 0xFF);
  word[L::kFrameCrc] = crc8(std::span(word).subspan(L::kSensorId, L::kFrameCrc - L::kSensorId));
  return word;
}

DecodeResult decode_frame(const FrameWord& word) noexcept {
  namespace L = frame_layout;
  DecodeResult result;
  auto preamble = static_cast<std::uint16_t>((word[L::kPreamble] << 8) | word[L::kPreamble + 1]);
  if (preamble != kPreamble) {
    result.error = DecodeError::bad_preamble;
    return result;
  }
  auto id = from_rom_bytes(std::span(word).subspan<L::kSensorId, 8>());
  if (!validate_sensor_id(id)) {
    result.error = DecodeError::bad_id_crc;
    return result;
  }
  auto covered = std::span(word).subspan(L::kSensorId, L::kFrameCrc - L::kSensorId);
  if (crc8(covered) != word[L::kFrameCrc]) {
    result.error = DecodeError::bad_frame_crc;
    return result;
  }
  Frame f;
  f.sensor_id = id;
  f.raw_temp = static_cast<std::int16_t>((word[L::kRawTemp] << 8) | word[L::kRawTemp + 1]);
  f.sequence = static_cast<std::uint16_t>((word[L::kSequence] << 8) | word[L::kSequence + 1]);
  f.frame_crc = word[L::kFrameCrc];
  result.frame = f;
  return result;
}

std::string to_hex(const FrameWord& word) { return bytes_to_hex(word); }

std::optional<FrameWord> frame_from_hex(std::string_view hex) {
  FrameWord word{};
  if (!hex_to_bytes(hex, word)) return std::nullopt;
  return word;
}

}  // namespace wbsn
