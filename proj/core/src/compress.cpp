#include "neuroramp/compress.hpp"

#include <cmath>

namespace neuroramp::compress {

namespace {

constexpr std::int32_t kSumMax = 1023;   // signed 11-bit
constexpr std::int32_t kSumMin = -1024;
constexpr std::int32_t kComponentMax = 31;  // signed 6-bit
constexpr std::int32_t kComponentMin = -32;
constexpr std::int32_t kCoeffMax = 255;  // signed 9-bit
constexpr std::int32_t kCoeffMin = -256;

std::int32_t saturate(std::int64_t v, std::int32_t lo, std::int32_t hi,
                      std::uint64_t* events) {
  if (v > hi) {
    if (events) ++*events;
    return hi;
  }
  if (v < lo) {
    if (events) ++*events;
    return lo;
  }
  return static_cast<std::int32_t>(v);
}

// Arithmetic right shift with floor semantics for negative values.
std::int64_t floor_shift(std::int64_t v, int shift) { return v >> shift; }

void put_bits(std::uint64_t& word, int& pos, std::uint64_t value, int width) {
  word |= (value & ((std::uint64_t{1} << width) - 1)) << pos;
  pos += width;
}

std::uint64_t get_bits(std::uint64_t word, int& pos, int width) {
  const std::uint64_t v = (word >> pos) & ((std::uint64_t{1} << width) - 1);
  pos += width;
  return v;
}

std::int64_t sign_extend(std::uint64_t v, int width) {
  const std::uint64_t sign = std::uint64_t{1} << (width - 1);
  return static_cast<std::int64_t>((v ^ sign) - sign);
}

}  // namespace

std::uint64_t ChannelMemoryEntry::pack() const {
  std::uint64_t word = 0;
  int pos = 0;
  put_bits(word, pos, state, 2);
  put_bits(word, pos, sample_index, 5);
  for (const std::int16_t sum : running_sums)
    put_bits(word, pos, static_cast<std::uint64_t>(static_cast<std::int64_t>(sum)), 11);
  return word;  // pos == 51; bits 51..63 stay zero
}

ChannelMemoryEntry ChannelMemoryEntry::unpack(std::uint64_t word) {
  ChannelMemoryEntry entry;
  int pos = 0;
  entry.state = static_cast<std::uint8_t>(get_bits(word, pos, 2));
  entry.sample_index = static_cast<std::uint8_t>(get_bits(word, pos, 5));
  for (auto& sum : entry.running_sums)
    sum = static_cast<std::int16_t>(sign_extend(get_bits(word, pos, 11), 11));
  return entry;
}

std::array<std::uint8_t, 99> QuantizedPcaMemory::pack_coefficients() const {
  std::array<std::uint8_t, 99> bytes{};
  int bit = 0;
  for (const auto& row : coefficients) {
    for (const std::int16_t c : row) {
      const auto v = static_cast<std::uint32_t>(c & 0x1FF);  // 9-bit field
      for (int b = 0; b < 9; ++b, ++bit) {
        if (v & (1u << b)) bytes[bit / 8] |= static_cast<std::uint8_t>(1u << (bit % 8));
      }
    }
  }
  return bytes;  // bit == 792 == 99 bytes exactly
}

QuantizedPcaMemory QuantizedPcaMemory::unpack_coefficients(
    std::span<const std::uint8_t> bytes, int mac_shift, int out_shift,
    double scale) {
  if (bytes.size() != 99)
    throw Error(Errc::kLengthMismatch, "coefficient memory must be 99 bytes");
  QuantizedPcaMemory mem;
  mem.mac_shift = mac_shift;
  mem.out_shift = out_shift;
  mem.scale = scale;
  int bit = 0;
  for (auto& row : mem.coefficients) {
    for (auto& c : row) {
      std::uint32_t v = 0;
      for (int b = 0; b < 9; ++b, ++bit) {
        if (bytes[bit / 8] & (1u << (bit % 8))) v |= 1u << b;
      }
      c = static_cast<std::int16_t>(sign_extend(v, 9));
    }
  }
  return mem;
}

void QuantizedPcaMemory::validate() const {
  if (mac_shift < 0 || mac_shift > 16 || out_shift < 0 || out_shift > 16)
    throw Error(Errc::kInvalidConfig, "shift out of range");
  if (!(scale > 0))
    throw Error(Errc::kInvalidConfig, "scale must be positive");
  for (const auto& row : coefficients)
    for (const std::int16_t c : row)
      if (c < kCoeffMin || c > kCoeffMax)
        throw Error(Errc::kInvalidConfig, "coefficient outside signed 9-bit");
}

std::uint32_t CompressedSpike::pack_payload() const {
  std::uint32_t payload = 0;
  for (int c = 0; c < kComponentCount; ++c)
    payload |= static_cast<std::uint32_t>(components[c] & 0x3F) << (6 * c);
  return payload;  // 24 bits
}

std::array<std::int8_t, kComponentCount> CompressedSpike::unpack_payload(
    std::uint32_t payload) {
  std::array<std::int8_t, kComponentCount> out{};
  for (int c = 0; c < kComponentCount; ++c) {
    const auto v = (payload >> (6 * c)) & 0x3F;
    out[c] = static_cast<std::int8_t>(sign_extend(v, 6));
  }
  return out;
}

ChannelMemoryEntry mac_step(const ChannelMemoryEntry& entry, int code,
                            const QuantizedPcaMemory& mem,
                            std::uint64_t* saturation_events) {
  if (entry.sample_index >= kSpikeWindowSamples)
    throw Error(Errc::kIndexOverflow, "spike window already complete");
  ChannelMemoryEntry next = entry;
  const std::int64_t centered = code - kBaselineCode;
  for (int c = 0; c < kComponentCount; ++c) {
    const std::int64_t product =
        centered * mem.coefficients[c][entry.sample_index];
    const std::int64_t contribution = floor_shift(product, mem.mac_shift);
    next.running_sums[c] = static_cast<std::int16_t>(
        saturate(next.running_sums[c] + contribution, kSumMin, kSumMax,
                 saturation_events));
  }
  ++next.sample_index;
  return next;
}

CompressedSpike finalize(ChannelMemoryEntry& entry,
                         const QuantizedPcaMemory& mem, int channel,
                         std::int64_t period_index,
                         std::uint64_t* saturation_events, int window_length) {
  if (entry.sample_index != window_length)
    throw Error(Errc::kIndexOverflow,
                "finalize on incomplete window (index " +
                    std::to_string(entry.sample_index) + " of " +
                    std::to_string(window_length) + ")");
  CompressedSpike spike;
  spike.channel = channel;
  spike.period_index = period_index;
  for (int c = 0; c < kComponentCount; ++c) {
    const std::int64_t shifted =
        floor_shift(entry.running_sums[c], mem.out_shift);
    spike.components[c] = static_cast<std::int8_t>(
        saturate(shifted, kComponentMin, kComponentMax, saturation_events));
  }
  entry.clear();
  return spike;
}

StreamResult process_stream(std::span<const StreamItem> items,
                            const QuantizedPcaMemory& mem, int channel_count,
                            int window_length) {
  if (channel_count > kMaxStreamChannels)
    throw Error(Errc::kCapacityExceeded,
                std::to_string(channel_count) + " channels exceed the " +
                    std::to_string(kMaxStreamChannels) + "-channel capacity");
  if (channel_count < 1)
    throw Error(Errc::kInvalidConfig, "channel_count must be >= 1");
  if (window_length < 1 || window_length > kSpikeWindowSamples)
    throw Error(Errc::kInvalidConfig, "window_length out of range");

  std::vector<ChannelMemoryEntry> memory(channel_count);
  std::vector<std::int64_t> window_start(channel_count, 0);
  StreamResult result;
  for (const StreamItem& item : items) {
    if (item.channel < 0 || item.channel >= channel_count)
      throw Error(Errc::kInvalidConfig, "stream item channel out of range");
    ChannelMemoryEntry& entry = memory[item.channel];
    switch (item.action) {
      case adc::TriggerAction::kIgnore:
        break;
      case adc::TriggerAction::kAbortArm:
        entry.clear();
        break;
      case adc::TriggerAction::kDigitize:
      case adc::TriggerAction::kConfirmSpike: {
        if (entry.idle() && entry.sample_index == 0)
          window_start[item.channel] = item.period_index;
        if (item.action == adc::TriggerAction::kConfirmSpike)
          entry.state = 2;
        else if (entry.idle())
          entry.state = 1;
        entry = mac_step(entry, item.code, mem, &result.saturation_events);
        ++result.cycles_consumed;
        if (entry.sample_index == window_length) {
          if (entry.state == 2) {
            result.spikes.push_back(finalize(entry, mem, item.channel,
                                             window_start[item.channel],
                                             &result.saturation_events,
                                             window_length));
          } else {
            entry.clear();  // window filled without a confirm: discard
          }
        }
        break;
      }
    }
  }
  return result;
}

double component_scale(const QuantizedPcaMemory& mem) {
  return mem.scale / std::pow(2.0, mem.mac_shift + mem.out_shift);
}

std::vector<double> decompress(const CompressedSpike& spike,
                               const QuantizedPcaMemory& mem) {
  std::vector<double> samples(kSpikeWindowSamples, 0.0);
  const double undo = std::pow(2.0, mem.mac_shift + mem.out_shift) /
                      (mem.scale * mem.scale);
  for (int i = 0; i < kSpikeWindowSamples; ++i) {
    double acc = 0.0;
    for (int c = 0; c < kComponentCount; ++c)
      acc += static_cast<double>(spike.components[c]) * mem.coefficients[c][i];
    samples[i] = acc * undo;
  }
  return samples;
}

double mac_error_bound(const QuantizedPcaMemory& mem, double max_abs_sample,
                       int window_length) {
  const double pow_mac_out = std::pow(2.0, mem.mac_shift + mem.out_shift);
  const double coeff_rounding =
      0.5 * window_length * max_abs_sample / pow_mac_out;
  const double mac_truncation =
      static_cast<double>(window_length) / std::pow(2.0, mem.out_shift);
  const double out_truncation = 1.0;
  return coeff_rounding + mac_truncation + out_truncation;
}

}  // namespace neuroramp::compress
