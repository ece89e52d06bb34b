#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "neuroramp/adc.hpp"
#include "neuroramp/errors.hpp"

namespace neuroramp::compress {

inline constexpr int kSpikeWindowSamples = 22;
inline constexpr int kComponentCount = 4;
inline constexpr int kBaselineCode = 128;  // mid-scale of the 8-bit range

// Streaming compressor capacity: one sample per clock cycle at 16 MHz,
// 20 kHz sampling and 1/1 spike density give 800 concurrently active
// channels.
inline constexpr int kMaxStreamChannels = 800;

// Per-channel compressor memory word. Packs to exactly 51 bits:
// state(2) | sample_index(5) | four signed 11-bit running sums.
struct ChannelMemoryEntry {
  std::uint8_t state = 0;        // 0 idle, 1 armed, 2 capturing
  std::uint8_t sample_index = 0; // next coefficient row, 0..21
  std::array<std::int16_t, kComponentCount> running_sums{0, 0, 0, 0};

  static constexpr int kPackedBits = 51;
  std::uint64_t pack() const;
  static ChannelMemoryEntry unpack(std::uint64_t word);

  bool idle() const { return state == 0; }
  void clear() { *this = ChannelMemoryEntry{}; }
};

// Shared coefficient memory: 4 components x 22 samples x signed 9-bit,
// exactly 792 bits. mac_shift truncates each product before accumulation;
// out_shift truncates the final sum down to the 6-bit component.
struct QuantizedPcaMemory {
  std::array<std::array<std::int16_t, kSpikeWindowSamples>, kComponentCount>
      coefficients{};
  int mac_shift = 6;
  int out_shift = 5;
  // Coefficient units per basis unit; needed to undo the fixed-point scale
  // chain at decompression time.
  double scale = 1.0;

  static constexpr int kPackedBits = 792;
  std::array<std::uint8_t, 99> pack_coefficients() const;
  static QuantizedPcaMemory unpack_coefficients(
      std::span<const std::uint8_t> bytes, int mac_shift, int out_shift,
      double scale);

  void validate() const;
};

// One compressed spike: 6-bit channel address, trigger period, four signed
// 6-bit principal components (24-bit payload).
struct CompressedSpike {
  int channel = 0;
  std::int64_t period_index = 0;  // sampling period of the window start
  std::array<std::int8_t, kComponentCount> components{0, 0, 0, 0};

  static constexpr int kPayloadBits = 24;
  std::uint32_t pack_payload() const;
  static std::array<std::int8_t, kComponentCount> unpack_payload(
      std::uint32_t payload);
};

// One MAC update: center the code at 128, multiply by the coefficients at
// the current sample index, truncate by mac_shift (arithmetic shift, floor)
// and accumulate with 11-bit saturation. Throws kIndexOverflow when the
// window is already full.
ChannelMemoryEntry mac_step(const ChannelMemoryEntry& entry, int code,
                            const QuantizedPcaMemory& mem,
                            std::uint64_t* saturation_events = nullptr);

// Emits the compressed spike once all window samples were accumulated and
// resets the entry. Rejects incomplete windows (kIndexOverflow).
CompressedSpike finalize(ChannelMemoryEntry& entry,
                         const QuantizedPcaMemory& mem, int channel,
                         std::int64_t period_index,
                         std::uint64_t* saturation_events = nullptr,
                         int window_length = kSpikeWindowSamples);

// One detector-qualified sample (or an abort marker) of the interleaved
// multi-channel stream feeding the compressor.
struct StreamItem {
  int channel = 0;
  std::int64_t period_index = 0;
  int code = 0;  // meaningless for kAbortArm
  adc::TriggerAction action = adc::TriggerAction::kDigitize;
};

struct StreamResult {
  std::vector<CompressedSpike> spikes;
  std::uint64_t cycles_consumed = 0;  // one clock cycle per consumed sample
  std::uint64_t saturation_events = 0;
};

// Runs the sequential MAC datapath over a time-ordered interleaved stream.
// Maintains one ChannelMemoryEntry per channel; kAbortArm clears the
// channel's partial sums. Throws kCapacityExceeded beyond 800 channels.
StreamResult process_stream(std::span<const StreamItem> items,
                            const QuantizedPcaMemory& mem, int channel_count,
                            int window_length = kSpikeWindowSamples);

// Inverse transform back to centered code units (pure function):
// sample_i = sum_c components[c] * coeff[c][i] * 2^(mac+out) / scale^2.
std::vector<double> decompress(const CompressedSpike& spike,
                               const QuantizedPcaMemory& mem);

// Worst-case gap, in component units, between a fixed-point component and
// the scaled double-precision projection of the same window:
//   coefficient rounding  0.5 * window * max|x| / 2^(mac+out)
// + MAC truncation        window / 2^out
// + output truncation     1
double mac_error_bound(const QuantizedPcaMemory& mem, double max_abs_sample,
                       int window_length = kSpikeWindowSamples);

// Scale factor mapping a double-precision projection (centered code units)
// into fixed-point component units.
double component_scale(const QuantizedPcaMemory& mem);

}  // namespace neuroramp::compress
