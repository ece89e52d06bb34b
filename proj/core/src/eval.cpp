#include "neuroramp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace neuroramp::eval {

DnlResult dnl(std::span<const std::uint64_t> histogram) {
  if (histogram.size() < 3)
    throw Error(Errc::kEmptyHistogram, "histogram too small");
  const std::size_t first = 1, last = histogram.size() - 2;
  std::uint64_t total = 0;
  for (std::size_t i = first; i <= last; ++i) total += histogram[i];
  if (total == 0)
    throw Error(Errc::kEmptyHistogram, "no hits on interior codes");
  const double mean =
      static_cast<double>(total) / static_cast<double>(last - first + 1);
  DnlResult result;
  result.first_code = static_cast<int>(first);
  result.values.reserve(last - first + 1);
  for (std::size_t i = first; i <= last; ++i)
    result.values.push_back(static_cast<double>(histogram[i]) / mean - 1.0);
  return result;
}

std::vector<double> inl(std::span<const double> dnl_values) {
  std::vector<double> out(dnl_values.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < dnl_values.size(); ++i) {
    acc += dnl_values[i];
    out[i] = acc;
  }
  return out;
}

namespace {

double eq5_accuracy(std::int64_t tp, std::int64_t fn, std::int64_t fp) {
  const std::int64_t denom = tp + fn + fp;
  return denom == 0 ? 0.0
                    : static_cast<double>(tp) / static_cast<double>(denom);
}

// Greedy in found-time order; returns per-found matched truth index or -1.
std::vector<std::int64_t> greedy_match(std::span<const std::int64_t> gt_times,
                                       std::span<const std::int64_t> found_times,
                                       std::int64_t window) {
  std::vector<bool> taken(gt_times.size(), false);
  std::vector<std::int64_t> match(found_times.size(), -1);
  std::size_t lo = 0;
  for (std::size_t f = 0; f < found_times.size(); ++f) {
    const std::int64_t t = found_times[f];
    while (lo < gt_times.size() && gt_times[lo] < t - window) ++lo;
    std::int64_t best = -1;
    std::int64_t best_dist = window + 1;
    for (std::size_t g = lo; g < gt_times.size() && gt_times[g] <= t + window;
         ++g) {
      if (taken[g]) continue;
      const std::int64_t dist = std::abs(gt_times[g] - t);
      if (dist < best_dist) {
        best_dist = dist;
        best = static_cast<std::int64_t>(g);
      }
    }
    if (best >= 0) {
      taken[static_cast<std::size_t>(best)] = true;
      match[f] = best;
    }
  }
  return match;
}

}  // namespace

MatchReport match_spikes(std::span<const std::int64_t> gt_times,
                         std::span<const std::int64_t> found_times,
                         std::int64_t window_samples) {
  if (window_samples <= 0)
    throw Error(Errc::kInvalidConfig, "matching window must be positive");
  const auto match = greedy_match(gt_times, found_times, window_samples);
  MatchReport report;
  for (const std::int64_t m : match)
    if (m >= 0) ++report.tp;
  report.fp = static_cast<std::int64_t>(found_times.size()) - report.tp;
  report.fn = static_cast<std::int64_t>(gt_times.size()) - report.tp;
  report.accuracy = eq5_accuracy(report.tp, report.fn, report.fp);
  return report;
}

MatchReport score_sorting(const synth::GroundTruth& gt,
                          std::span<const FoundSpike> found,
                          std::int64_t window_samples) {
  if (window_samples <= 0)
    throw Error(Errc::kInvalidConfig, "matching window must be positive");

  // Row/column index maps. Rows: every ground-truth cell. Columns: every
  // label seen in the detections (including -1 for unassignable spikes).
  std::map<int, std::size_t> row_of;
  for (const auto& s : gt.spikes) row_of.emplace(s.cell_id, 0);
  std::size_t r = 0;
  for (auto& [id, idx] : row_of) idx = r++;
  std::map<int, std::size_t> col_of;
  for (const auto& f : found) col_of.emplace(f.label, 0);
  std::size_t c = 0;
  for (auto& [id, idx] : col_of) idx = c++;

  MatchReport report;
  report.row_cell_ids.reserve(row_of.size());
  for (const auto& [id, idx] : row_of) report.row_cell_ids.push_back(id);
  report.col_labels.reserve(col_of.size());
  for (const auto& [id, idx] : col_of) report.col_labels.push_back(id);
  report.confusion.assign(row_of.size(),
                          std::vector<std::int64_t>(col_of.size(), 0));
  report.unmatched_gt.assign(row_of.size(), 0);
  report.unmatched_found.assign(col_of.size(), 0);

  // Matching is channel-local: a detection can only explain ground truth
  // whose dominant channel is the detection's channel.
  std::map<int, std::vector<std::size_t>> gt_by_channel;
  for (std::size_t i = 0; i < gt.spikes.size(); ++i)
    gt_by_channel[gt.spikes[i].channel].push_back(i);
  std::map<int, std::vector<std::size_t>> found_by_channel;
  for (std::size_t i = 0; i < found.size(); ++i)
    found_by_channel[found[i].channel].push_back(i);

  std::vector<bool> gt_matched(gt.spikes.size(), false);
  std::vector<bool> found_matched(found.size(), false);
  for (const auto& [channel, gt_idx] : gt_by_channel) {
    const auto it = found_by_channel.find(channel);
    if (it == found_by_channel.end()) continue;
    const auto& found_idx = it->second;
    std::vector<std::int64_t> gt_times(gt_idx.size());
    for (std::size_t i = 0; i < gt_idx.size(); ++i)
      gt_times[i] = gt.spikes[gt_idx[i]].time_sample;
    std::vector<std::int64_t> found_times(found_idx.size());
    for (std::size_t i = 0; i < found_idx.size(); ++i)
      found_times[i] = found[found_idx[i]].time_sample;
    const auto match = greedy_match(gt_times, found_times, window_samples);
    for (std::size_t f = 0; f < match.size(); ++f) {
      if (match[f] < 0) continue;
      const auto& truth = gt.spikes[gt_idx[static_cast<std::size_t>(match[f])]];
      const auto& det = found[found_idx[f]];
      ++report.confusion[row_of[truth.cell_id]][col_of[det.label]];
      gt_matched[gt_idx[static_cast<std::size_t>(match[f])]] = true;
      found_matched[found_idx[f]] = true;
    }
  }
  for (std::size_t i = 0; i < gt.spikes.size(); ++i)
    if (!gt_matched[i]) ++report.unmatched_gt[row_of[gt.spikes[i].cell_id]];
  for (std::size_t i = 0; i < found.size(); ++i)
    if (!found_matched[i]) ++report.unmatched_found[col_of[found[i].label]];

  // Eq-5 aggregate: only same-cell matches count as true positives.
  std::int64_t diagonal = 0;
  for (const auto& [id, row] : row_of) {
    const auto col = col_of.find(id);
    if (col != col_of.end()) diagonal += report.confusion[row][col->second];
  }
  report.tp = diagonal;
  report.fn = static_cast<std::int64_t>(gt.spikes.size()) - diagonal;
  report.fp = static_cast<std::int64_t>(found.size()) - diagonal;
  report.accuracy = eq5_accuracy(report.tp, report.fn, report.fp);
  return report;
}

Centroids train_centroids(std::span<const LabeledFeature> labeled) {
  if (labeled.empty())
    throw Error(Errc::kUnlabeledTraining, "no labeled training spikes");
  std::map<int, Centroids::Entry> by_cell;
  for (const LabeledFeature& item : labeled) {
    if (item.cell_id < 0)
      throw Error(Errc::kUnlabeledTraining, "negative cell id in training set");
    auto& entry = by_cell[item.cell_id];
    if (entry.count == 0) {
      entry.cell_id = item.cell_id;
      entry.channel = item.channel;
      entry.mean.assign(item.feature.size(), 0.0);
    }
    if (entry.mean.size() != item.feature.size())
      throw Error(Errc::kLengthMismatch, "inconsistent feature lengths");
    for (std::size_t i = 0; i < item.feature.size(); ++i)
      entry.mean[i] += item.feature[i];
    ++entry.count;
  }
  Centroids centroids;
  for (auto& [id, entry] : by_cell) {
    for (double& v : entry.mean) v /= static_cast<double>(entry.count);
    centroids.entries.push_back(std::move(entry));
  }
  return centroids;
}

int classify(std::span<const double> feature, int channel,
             const Centroids& centroids) {
  int best_id = -1;
  double best_dist = 0.0;
  for (const auto& entry : centroids.entries) {
    if (entry.channel != channel) continue;
    if (entry.mean.size() != feature.size())
      throw Error(Errc::kLengthMismatch, "feature/centroid length mismatch");
    double dist = 0.0;
    for (std::size_t i = 0; i < feature.size(); ++i) {
      const double d = feature[i] - entry.mean[i];
      dist += d * d;
    }
    // Entries are sorted by cell id, so strict < keeps the lowest id on ties.
    if (best_id < 0 || dist < best_dist) {
      best_id = entry.cell_id;
      best_dist = dist;
    }
  }
  return best_id;
}

RatioReport compression_ratio(const Rational& sample_rate_hz, int sample_bits,
                              const Rational& spike_rate_hz,
                              std::int64_t detected_overhead_bits,
                              std::int64_t compressed_overhead_bits) {
  if (sample_rate_hz.num() == 0)
    throw Error(Errc::kZeroRate, "sample rate is zero");
  if (spike_rate_hz.num() == 0)
    throw Error(Errc::kZeroRate, "spike rate is zero");
  if (sample_bits < 1)
    throw Error(Errc::kInvalidConfig, "sample_bits must be >= 1");

  RatioReport report;
  report.detected_overhead_bits = detected_overhead_bits;
  report.compressed_overhead_bits = compressed_overhead_bits;
  report.raw_bits_per_s = sample_rate_hz * Rational(sample_bits);
  report.detected_bits_per_s =
      spike_rate_hz * Rational(22 * sample_bits + detected_overhead_bits);
  report.compressed_bits_per_s =
      spike_rate_hz * Rational(24 + compressed_overhead_bits);
  report.detected_ratio = report.raw_bits_per_s / report.detected_bits_per_s;
  report.compressed_ratio =
      report.raw_bits_per_s / report.compressed_bits_per_s;
  report.fold_compressed_over_detected =
      report.compressed_ratio / report.detected_ratio;
  return report;
}

BudgetReport throughput_budget(std::int64_t channel_count,
                               std::int64_t sample_rate_hz,
                               std::int64_t clock_hz,
                               const Rational& spike_density) {
  if (channel_count < 1 || sample_rate_hz < 1 || clock_hz < 1)
    throw Error(Errc::kInvalidConfig, "budget inputs must be positive");
  if (spike_density.num() <= 0)
    throw Error(Errc::kInvalidConfig, "spike density must be positive");
  BudgetReport report;
  report.channel_count = channel_count;
  report.cycles_per_period = clock_hz / sample_rate_hz;
  report.max_concurrent_digitizations = report.cycles_per_period;
  const Rational capacity =
      Rational(clock_hz) / (Rational(sample_rate_hz) * spike_density);
  report.compressor_channel_capacity = capacity.num() / capacity.den();
  return report;
}

ReconstructionQuality reconstruction_quality(
    const std::vector<std::vector<double>>& original,
    const std::vector<std::vector<double>>& decompressed) {
  if (original.size() != decompressed.size())
    throw Error(Errc::kLengthMismatch, "window count mismatch");
  ReconstructionQuality q;
  q.pearson_r.reserve(original.size());
  q.rmse.reserve(original.size());
  for (std::size_t w = 0; w < original.size(); ++w) {
    const auto& x = original[w];
    const auto& y = decompressed[w];
    if (x.size() != y.size() || x.empty())
      throw Error(Errc::kLengthMismatch, "window length mismatch");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0, err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double dx = x[i] - mx;
      const double dy = y[i] - my;
      sxx += dx * dx;
      syy += dy * dy;
      sxy += dx * dy;
      const double e = x[i] - y[i];
      err += e * e;
    }
    const double denom = std::sqrt(sxx * syy);
    q.pearson_r.push_back(denom > 0 ? sxy / denom : 0.0);
    q.rmse.push_back(std::sqrt(err / n));
  }
  if (!q.pearson_r.empty()) {
    q.mean_r = std::accumulate(q.pearson_r.begin(), q.pearson_r.end(), 0.0) /
               static_cast<double>(q.pearson_r.size());
    q.mean_rmse = std::accumulate(q.rmse.begin(), q.rmse.end(), 0.0) /
                  static_cast<double>(q.rmse.size());
  }
  return q;
}

}  // namespace neuroramp::eval
