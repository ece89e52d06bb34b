#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "neuroramp/compress.hpp"
#include "neuroramp/errors.hpp"

namespace neuroramp::link {

// ---------------------------------------------------------------------------
// Manchester line code. Convention: 1 -> (1,0), 0 -> (0,1). Every bit emits
// exactly one high chip, so any encoded stream is DC-balanced.
// ---------------------------------------------------------------------------

// bits and chips are sequences of 0/1 values.
std::vector<std::uint8_t> manchester_encode(std::span<const std::uint8_t> bits);

// Throws kInvalidChipPair (with the chip offset) on (0,0)/(1,1) pairs and
// kTruncatedFrame on odd-length input.
std::vector<std::uint8_t> manchester_decode(std::span<const std::uint8_t> chips);

// Bit/byte helpers, LSB-first within each byte.
std::vector<std::uint8_t> bytes_to_bits(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> bits_to_bytes(std::span<const std::uint8_t> bits);

// Chip stream <-> packed bytes (MSB-first within each byte) for files.
std::vector<std::uint8_t> pack_chips(std::span<const std::uint8_t> chips);
std::vector<std::uint8_t> unpack_chips(std::span<const std::uint8_t> bytes);

// ---------------------------------------------------------------------------
// Configuration frames: preamble 0xAA55, 8-bit payload length, payload,
// CRC-8/ATM over length+payload; the whole frame is Manchester encoded.
// ---------------------------------------------------------------------------

std::uint8_t crc8_atm(std::span<const std::uint8_t> data);

// Payload is limited to 255 bytes by the 8-bit length field.
std::vector<std::uint8_t> frame_config(std::span<const std::uint8_t> payload);

// Inverse of frame_config. Throws kBadPreamble / kTruncatedFrame / kBadCrc /
// kInvalidChipPair.
std::vector<std::uint8_t> parse_frame(std::span<const std::uint8_t> chips);

// Transfer time of one framed payload on the inbound link (2 Mbit/s of data
// bits; the Manchester chip rate is twice that).
double config_load_time_s(std::size_t payload_bytes,
                          double data_rate_bps = 2e6);

// ---------------------------------------------------------------------------
// Controller register bank. Byte-addressed map:
//   0x00..0x06  pixel_enable (49 bits, LSB-first)
//   0x10        threshold1
//   0x11        threshold2
//   0x12/0x13   sampling_period_divider (lo/hi)
//   0x14        pretrigger_n (5 bits)
//   0x15        mode (0 raw, 1 compressed)
//   0x20..0x82  PCA coefficient memory (99 bytes = 792 bits)
// ---------------------------------------------------------------------------

enum class RecordMode : std::uint8_t { kRaw = 0, kCompressed = 1 };

class RegisterBank {
 public:
  static constexpr int kChannelCount = 49;
  static constexpr std::uint16_t kPixelEnableBase = 0x00;
  static constexpr std::uint16_t kThreshold1 = 0x10;
  static constexpr std::uint16_t kThreshold2 = 0x11;
  static constexpr std::uint16_t kSamplingDividerLo = 0x12;
  static constexpr std::uint16_t kSamplingDividerHi = 0x13;
  static constexpr std::uint16_t kPretriggerN = 0x14;
  static constexpr std::uint16_t kMode = 0x15;
  static constexpr std::uint16_t kPcaCoeffBase = 0x20;
  static constexpr std::size_t kPcaCoeffBytes = 99;

  RegisterBank();

  void write(std::uint16_t address, std::uint8_t value);
  std::uint8_t read(std::uint16_t address) const;
  static bool is_mapped(std::uint16_t address);

  // Typed accessors over the raw bytes.
  bool pixel_enabled(int channel) const;
  void set_pixel_enabled(int channel, bool enabled);
  int threshold1() const { return regs_[kThreshold1]; }
  int threshold2() const { return regs_[kThreshold2]; }
  std::uint16_t sampling_period_divider() const;
  void set_sampling_period_divider(std::uint16_t divider);
  int pretrigger_n() const { return regs_[kPretriggerN] & 0x1F; }
  RecordMode mode() const {
    return regs_[kMode] ? RecordMode::kCompressed : RecordMode::kRaw;
  }
  void set_mode(RecordMode mode) {
    regs_[kMode] = mode == RecordMode::kCompressed ? 1 : 0;
  }

  void load_pca_coefficients(const compress::QuantizedPcaMemory& mem);
  // Streams the coefficient bytes into a coefficient memory; shifts and scale
  // are calibration outputs and live outside the bank.
  compress::QuantizedPcaMemory pca_memory(int mac_shift, int out_shift,
                                          double scale) const;

  // Whole-bank image in address order (only mapped bytes). Lossless.
  std::vector<std::uint8_t> serialize() const;
  static RegisterBank deserialize(std::span<const std::uint8_t> bytes);

 private:
  std::array<std::uint8_t, 0x100> regs_{};
};

}  // namespace neuroramp::link
