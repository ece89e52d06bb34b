#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "neuroramp/adc.hpp"
#include "neuroramp/compress.hpp"
#include "neuroramp/errors.hpp"
#include "neuroramp/eval.hpp"
#include "neuroramp/synth.hpp"
#include "neuroramp/train.hpp"

namespace neuroramp::io {

// ---------------------------------------------------------------------------
// Recording corpus: <base>.f32raw (little-endian float32, channel-major),
// <base>.header.json, <base>.gt.json.
// ---------------------------------------------------------------------------

void write_recording(const std::filesystem::path& base,
                     const synth::Recording& recording,
                     const synth::GroundTruth& gt);

synth::Recording read_recording(const std::filesystem::path& base);
synth::GroundTruth read_ground_truth(const std::filesystem::path& base);

// ---------------------------------------------------------------------------
// Raw event stream. One 32-bit little-endian word per digitized sample:
//   [channel:6][code:8][ramp_cycle:10][reserved:8]   (LSB first)
// Each sampling period opens with the sync word 0xFFFFFFFF; the period index
// of an event is the number of syncs seen minus one. Events never collide
// with the sync because their reserved bits are zero.
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t kRawSyncWord = 0xFFFFFFFFu;

std::uint32_t encode_raw_event(const adc::AdcEvent& event);
adc::AdcEvent decode_raw_event(std::uint32_t word, std::int64_t period_index);

struct RawStream {
  std::vector<adc::AdcEvent> events;
  std::int64_t period_count = 0;
};

void write_raw_stream(const std::filesystem::path& path,
                      std::span<const adc::AdcEvent> events,
                      std::int64_t period_count);
RawStream read_raw_stream(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Compressed spike stream. Each record is the 16-bit sync 0xA55A followed by
// a 48-bit little-endian word:
//   [channel:6][period:18][PC0:6][PC1:6][PC2:6][PC3:6]   (LSB first)
// The 18-bit period field wraps; the reader unwinds it monotonically.
// ---------------------------------------------------------------------------

inline constexpr std::uint16_t kCompressedSync = 0xA55A;
inline constexpr int kPeriodFieldBits = 18;

std::uint64_t encode_compressed_record(const compress::CompressedSpike& spike);
compress::CompressedSpike decode_compressed_record(std::uint64_t word);

void write_compressed_stream(const std::filesystem::path& path,
                             std::span<const compress::CompressedSpike> spikes);
std::vector<compress::CompressedSpike> read_compressed_stream(
    const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Calibration artifacts and metric outputs
// ---------------------------------------------------------------------------

struct BasisFile {
  train::PcaBasis basis;
  compress::QuantizedPcaMemory memory;
};

void write_basis_json(const std::filesystem::path& path, const BasisFile& data);
BasisFile read_basis_json(const std::filesystem::path& path);

void write_trigger_json(const std::filesystem::path& path,
                        const adc::TriggerConfig& trigger);
adc::TriggerConfig read_trigger_json(const std::filesystem::path& path);

void write_histogram_csv(const std::filesystem::path& path,
                         std::span<const std::uint64_t> hits);
std::vector<std::uint64_t> read_histogram_csv(const std::filesystem::path& path);

void write_linearity_csv(const std::filesystem::path& path,
                         std::span<const double> values, int first_code,
                         const std::string& column);

void write_confusion_csv(const std::filesystem::path& path,
                         const eval::MatchReport& report);

void write_ratios_json(const std::filesystem::path& path,
                       const eval::RatioReport& report);

void write_budget_json(const std::filesystem::path& path,
                       const eval::BudgetReport& report);

}  // namespace neuroramp::io
