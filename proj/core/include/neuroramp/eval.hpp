#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "neuroramp/errors.hpp"
#include "neuroramp/rational.hpp"
#include "neuroramp/synth.hpp"

namespace neuroramp::eval {

// ---------------------------------------------------------------------------
// Quantizer linearity
// ---------------------------------------------------------------------------

struct DnlResult {
  std::vector<double> values;  // interior codes only
  int first_code = 1;          // code of values[0]
};

// DNL(i) = hits(i) / mean_hits - 1 over interior codes. The two edge codes
// absorb out-of-range inputs and are excluded. Throws kEmptyHistogram when no
// interior code was hit.
DnlResult dnl(std::span<const std::uint64_t> histogram);

// INL(i) = prefix sum of the DNL vector.
std::vector<double> inl(std::span<const double> dnl_values);

// ---------------------------------------------------------------------------
// Spike matching and classification
// ---------------------------------------------------------------------------

struct MatchReport {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  double accuracy = 0.0;  // tp / (tp + fn + fp); 0 when all counts are zero

  // Filled by the labeled scorer: rows are ground-truth cells, columns are
  // recovered labels, cells count time-matched spikes. unmatched_gt is the
  // false-negative column, unmatched_found the false-positive row.
  std::vector<int> row_cell_ids;
  std::vector<int> col_labels;
  std::vector<std::vector<std::int64_t>> confusion;
  std::vector<std::int64_t> unmatched_gt;
  std::vector<std::int64_t> unmatched_found;
};

// Greedy one-to-one matching of two spike trains: each found spike takes the
// nearest still-unmatched ground-truth spike within +/- window_samples.
// Leftover found spikes are FP, leftover truth FN. Both inputs must be
// ascending in time.
MatchReport match_spikes(std::span<const std::int64_t> gt_times,
                         std::span<const std::int64_t> found_times,
                         std::int64_t window_samples);

struct FoundSpike {
  int channel = 0;
  std::int64_t time_sample = 0;
  int label = -1;  // recovered cell id; -1 = unassignable
};

// Per-channel greedy matching of labeled detections against ground truth,
// aggregated into the confusion matrix. Eq-5 counts: tp = diagonal,
// fn = truth minus diagonal, fp = found minus diagonal.
MatchReport score_sorting(const synth::GroundTruth& gt,
                          std::span<const FoundSpike> found,
                          std::int64_t window_samples);

// Nearest-centroid classifier over arbitrary feature vectors (4 quantized
// components in compressed mode, 22 code samples in raw mode). Centroids are
// per cell and carry the cell's channel; classification considers only
// centroids on the spike's channel, ties resolve to the lowest cell id.
struct LabeledFeature {
  int cell_id = 0;
  int channel = 0;
  std::vector<double> feature;
};

struct Centroids {
  struct Entry {
    int cell_id = 0;
    int channel = 0;
    std::vector<double> mean;
    std::int64_t count = 0;
  };
  std::vector<Entry> entries;  // sorted by cell_id
};

Centroids train_centroids(std::span<const LabeledFeature> labeled);

int classify(std::span<const double> feature, int channel,
             const Centroids& centroids);

// ---------------------------------------------------------------------------
// Bandwidth accounting (exact rational arithmetic)
// ---------------------------------------------------------------------------

struct RatioReport {
  Rational raw_bits_per_s;
  Rational detected_bits_per_s;
  Rational compressed_bits_per_s;
  Rational detected_ratio;     // raw / detected
  Rational compressed_ratio;   // raw / compressed
  Rational fold_compressed_over_detected;
  std::int64_t detected_overhead_bits = 0;
  std::int64_t compressed_overhead_bits = 0;
};

// raw = sample_rate * sample_bits; detected = spike_rate * (22*8 + overhead);
// compressed = spike_rate * (24 + overhead). Throws kZeroRate when a rate is
// zero.
RatioReport compression_ratio(const Rational& sample_rate_hz, int sample_bits,
                              const Rational& spike_rate_hz,
                              std::int64_t detected_overhead_bits,
                              std::int64_t compressed_overhead_bits);

struct BudgetReport {
  std::int64_t cycles_per_period = 0;
  std::int64_t max_concurrent_digitizations = 0;
  std::int64_t compressor_channel_capacity = 0;
  std::int64_t channel_count = 0;
};

// Integer throughput arithmetic: 16 MHz / 20 kHz = 800 cycles per period;
// compressor capacity = clock / (sample_rate * spike_density).
BudgetReport throughput_budget(std::int64_t channel_count,
                               std::int64_t sample_rate_hz,
                               std::int64_t clock_hz,
                               const Rational& spike_density);

// ---------------------------------------------------------------------------
// Reconstruction quality
// ---------------------------------------------------------------------------

struct ReconstructionQuality {
  std::vector<double> pearson_r;
  std::vector<double> rmse;
  double mean_r = 0.0;
  double mean_rmse = 0.0;
};

ReconstructionQuality reconstruction_quality(
    const std::vector<std::vector<double>>& original,
    const std::vector<std::vector<double>>& decompressed);

}  // namespace neuroramp::eval
