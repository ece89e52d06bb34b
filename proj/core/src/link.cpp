#include "neuroramp/link.hpp"

#include <algorithm>

namespace neuroramp::link {

std::vector<std::uint8_t> manchester_encode(
    std::span<const std::uint8_t> bits) {
  std::vector<std::uint8_t> chips;
  chips.reserve(bits.size() * 2);
  for (const std::uint8_t bit : bits) {
    chips.push_back(bit ? 1 : 0);
    chips.push_back(bit ? 0 : 1);
  }
  return chips;
}

std::vector<std::uint8_t> manchester_decode(
    std::span<const std::uint8_t> chips) {
  if (chips.size() % 2 != 0)
    throw Error(Errc::kTruncatedFrame, "odd chip count", chips.size());
  std::vector<std::uint8_t> bits;
  bits.reserve(chips.size() / 2);
  for (std::size_t i = 0; i < chips.size(); i += 2) {
    const std::uint8_t a = chips[i] ? 1 : 0;
    const std::uint8_t b = chips[i + 1] ? 1 : 0;
    if (a == b)
      throw Error(Errc::kInvalidChipPair,
                  a ? "chip pair (1,1)" : "chip pair (0,0)", i);
    bits.push_back(a);
  }
  return bits;
}

std::vector<std::uint8_t> bytes_to_bits(std::span<const std::uint8_t> bytes) {
  std::vector<std::uint8_t> bits;
  bits.reserve(bytes.size() * 8);
  for (const std::uint8_t byte : bytes)
    for (int b = 0; b < 8; ++b) bits.push_back((byte >> b) & 1);
  return bits;
}

std::vector<std::uint8_t> bits_to_bytes(std::span<const std::uint8_t> bits) {
  if (bits.size() % 8 != 0)
    throw Error(Errc::kTruncatedFrame, "bit count not byte aligned",
                bits.size());
  std::vector<std::uint8_t> bytes(bits.size() / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) bytes[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  return bytes;
}

std::vector<std::uint8_t> pack_chips(std::span<const std::uint8_t> chips) {
  std::vector<std::uint8_t> bytes((chips.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < chips.size(); ++i)
    if (chips[i]) bytes[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  return bytes;
}

std::vector<std::uint8_t> unpack_chips(std::span<const std::uint8_t> bytes) {
  std::vector<std::uint8_t> chips;
  chips.reserve(bytes.size() * 8);
  for (const std::uint8_t byte : bytes)
    for (int b = 7; b >= 0; --b) chips.push_back((byte >> b) & 1);
  return chips;
}

std::uint8_t crc8_atm(std::span<const std::uint8_t> data) {
  std::uint8_t crc = 0x00;  // poly 0x07, no reflection, no final xor
  for (const std::uint8_t byte : data) {
    crc ^= byte;
    for (int b = 0; b < 8; ++b)
      crc = (crc & 0x80) ? static_cast<std::uint8_t>((crc << 1) ^ 0x07)
                         : static_cast<std::uint8_t>(crc << 1);
  }
  return crc;
}

namespace {
constexpr std::uint8_t kPreamble0 = 0xAA;
constexpr std::uint8_t kPreamble1 = 0x55;
}  // namespace

std::vector<std::uint8_t> frame_config(std::span<const std::uint8_t> payload) {
  if (payload.size() > 255)
    throw Error(Errc::kInvalidConfig,
                "payload exceeds the 255-byte frame limit");
  std::vector<std::uint8_t> frame;
  frame.reserve(payload.size() + 4);
  frame.push_back(kPreamble0);
  frame.push_back(kPreamble1);
  frame.push_back(static_cast<std::uint8_t>(payload.size()));
  frame.insert(frame.end(), payload.begin(), payload.end());
  frame.push_back(
      crc8_atm(std::span<const std::uint8_t>(frame).subspan(2)));  // len+payload
  return manchester_encode(bytes_to_bits(frame));
}

std::vector<std::uint8_t> parse_frame(std::span<const std::uint8_t> chips) {
  const auto bytes = bits_to_bytes(manchester_decode(chips));
  if (bytes.size() < 4)
    throw Error(Errc::kTruncatedFrame, "frame shorter than header", bytes.size());
  if (bytes[0] != kPreamble0 || bytes[1] != kPreamble1)
    throw Error(Errc::kBadPreamble, "expected 0xAA55", 0);
  const std::size_t length = bytes[2];
  if (bytes.size() != length + 4)
    throw Error(Errc::kTruncatedFrame,
                "length field says " + std::to_string(length) + " bytes",
                bytes.size());
  const auto crc = crc8_atm(
      std::span<const std::uint8_t>(bytes).subspan(2, length + 1));
  if (crc != bytes.back())
    throw Error(Errc::kBadCrc, "checksum mismatch", bytes.size() - 1);
  return {bytes.begin() + 3, bytes.end() - 1};
}

double config_load_time_s(std::size_t payload_bytes, double data_rate_bps) {
  if (!(data_rate_bps > 0))
    throw Error(Errc::kZeroRate, "data rate must be positive");
  const double frame_bits = static_cast<double>(payload_bytes + 4) * 8.0;
  return frame_bits / data_rate_bps;
}

RegisterBank::RegisterBank() {
  for (int ch = 0; ch < kChannelCount; ++ch) set_pixel_enabled(ch, true);
  regs_[kThreshold1] = 120;
  regs_[kThreshold2] = 118;
  set_sampling_period_divider(800);  // 16 MHz / 800 = 20 kHz
  regs_[kPretriggerN] = 3;
  regs_[kMode] = 1;
}

bool RegisterBank::is_mapped(std::uint16_t address) {
  if (address <= kPixelEnableBase + 6) return true;
  if (address >= kThreshold1 && address <= kMode) return true;
  if (address >= kPcaCoeffBase && address < kPcaCoeffBase + kPcaCoeffBytes)
    return true;
  return false;
}

void RegisterBank::write(std::uint16_t address, std::uint8_t value) {
  if (!is_mapped(address))
    throw Error(Errc::kUnknownAddress,
                "no register at address " + std::to_string(address), address);
  regs_[address] = value;
}

std::uint8_t RegisterBank::read(std::uint16_t address) const {
  if (!is_mapped(address))
    throw Error(Errc::kUnknownAddress,
                "no register at address " + std::to_string(address), address);
  return regs_[address];
}

bool RegisterBank::pixel_enabled(int channel) const {
  if (channel < 0 || channel >= kChannelCount)
    throw Error(Errc::kInvalidConfig, "channel out of range");
  return (regs_[kPixelEnableBase + channel / 8] >> (channel % 8)) & 1;
}

void RegisterBank::set_pixel_enabled(int channel, bool enabled) {
  if (channel < 0 || channel >= kChannelCount)
    throw Error(Errc::kInvalidConfig, "channel out of range");
  auto& byte = regs_[kPixelEnableBase + channel / 8];
  const auto mask = static_cast<std::uint8_t>(1u << (channel % 8));
  byte = enabled ? static_cast<std::uint8_t>(byte | mask)
                 : static_cast<std::uint8_t>(byte & ~mask);
}

std::uint16_t RegisterBank::sampling_period_divider() const {
  return static_cast<std::uint16_t>(regs_[kSamplingDividerLo] |
                                    (regs_[kSamplingDividerHi] << 8));
}

void RegisterBank::set_sampling_period_divider(std::uint16_t divider) {
  regs_[kSamplingDividerLo] = static_cast<std::uint8_t>(divider & 0xFF);
  regs_[kSamplingDividerHi] = static_cast<std::uint8_t>(divider >> 8);
}

void RegisterBank::load_pca_coefficients(
    const compress::QuantizedPcaMemory& mem) {
  const auto bytes = mem.pack_coefficients();
  for (std::size_t i = 0; i < bytes.size(); ++i)
    regs_[kPcaCoeffBase + i] = bytes[i];
}

compress::QuantizedPcaMemory RegisterBank::pca_memory(int mac_shift,
                                                      int out_shift,
                                                      double scale) const {
  std::array<std::uint8_t, kPcaCoeffBytes> bytes{};
  for (std::size_t i = 0; i < kPcaCoeffBytes; ++i)
    bytes[i] = regs_[kPcaCoeffBase + i];
  return compress::QuantizedPcaMemory::unpack_coefficients(bytes, mac_shift,
                                                           out_shift, scale);
}

std::vector<std::uint8_t> RegisterBank::serialize() const {
  std::vector<std::uint8_t> out;
  for (std::uint32_t addr = 0; addr < regs_.size(); ++addr)
    if (is_mapped(static_cast<std::uint16_t>(addr))) out.push_back(regs_[addr]);
  return out;
}

RegisterBank RegisterBank::deserialize(std::span<const std::uint8_t> bytes) {
  RegisterBank bank;
  std::size_t i = 0;
  for (std::uint32_t addr = 0; addr < bank.regs_.size(); ++addr) {
    if (!is_mapped(static_cast<std::uint16_t>(addr))) continue;
    if (i >= bytes.size())
      throw Error(Errc::kTruncatedFrame, "register image too short", i);
    bank.regs_[addr] = bytes[i++];
  }
  if (i != bytes.size())
    throw Error(Errc::kLengthMismatch, "register image too long", i);
  return bank;
}

}  // namespace neuroramp::link
