#include "neuroramp/train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "neuroramp/eval.hpp"
#include "neuroramp/pipeline.hpp"

namespace neuroramp::train {

SymmetricEigen jacobi_eigensolve(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  for (const auto& row : a)
    if (row.size() != n)
      throw Error(Errc::kInvalidConfig, "matrix must be square");

  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) norm += a[i][j] * a[i][j];
  norm = std::sqrt(norm);
  const double tol = 1e-14 * std::max(norm, 1e-300);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    if (std::sqrt(off) <= tol) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) <= tol / (n * n)) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a[x][x] > a[y][y];
  });

  SymmetricEigen out;
  out.values.reserve(n);
  out.vectors.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t r = 0; r < n; ++r) {
    out.values.push_back(a[order[r]][order[r]]);
    for (std::size_t k = 0; k < n; ++k) out.vectors[r][k] = v[k][order[r]];
  }
  return out;
}

PcaBasis compute_pca_basis(const SpikeMatrix& spikes, int k) {
  if (spikes.size() < 2)
    throw Error(Errc::kInvalidConfig, "need at least two spike rows");
  const std::size_t dim = spikes[0].size();
  if (k < 1 || static_cast<std::size_t>(k) > dim)
    throw Error(Errc::kInvalidConfig, "component count out of range");
  for (const auto& row : spikes)
    if (row.size() != dim)
      throw Error(Errc::kLengthMismatch, "ragged spike matrix");

  std::vector<double> mean(dim, 0.0);
  for (const auto& row : spikes)
    for (std::size_t i = 0; i < dim; ++i) mean[i] += row[i];
  for (double& m : mean) m /= static_cast<double>(spikes.size());

  std::vector<std::vector<double>> cov(dim, std::vector<double>(dim, 0.0));
  for (const auto& row : spikes) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double di = row[i] - mean[i];
      for (std::size_t j = i; j < dim; ++j)
        cov[i][j] += di * (row[j] - mean[j]);
    }
  }
  const double denom = static_cast<double>(spikes.size()) - 1.0;
  double max_abs = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) {
      cov[i][j] /= denom;
      cov[j][i] = cov[i][j];
      max_abs = std::max(max_abs, std::abs(cov[i][j]));
    }
  }
  if (max_abs < 1e-30)
    throw Error(Errc::kDegenerateCovariance, "all spike rows are identical");

  const SymmetricEigen eigen = jacobi_eigensolve(std::move(cov));

  PcaBasis basis;
  basis.mean = std::move(mean);
  basis.eigenvalues.assign(eigen.values.begin(), eigen.values.begin() + k);
  // Covariance spectra are nonnegative; clip roundoff.
  for (double& v : basis.eigenvalues) v = std::max(v, 0.0);
  basis.w.assign(dim, std::vector<double>(k, 0.0));
  for (int c = 0; c < k; ++c) {
    // Sign-normalize: largest-magnitude entry positive.
    std::size_t arg = 0;
    for (std::size_t i = 1; i < dim; ++i)
      if (std::abs(eigen.vectors[c][i]) > std::abs(eigen.vectors[c][arg]))
        arg = i;
    const double sign = eigen.vectors[c][arg] < 0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < dim; ++i)
      basis.w[i][c] = sign * eigen.vectors[c][i];
  }
  return basis;
}

compress::QuantizedPcaMemory quantize_basis(const PcaBasis& basis,
                                            int mac_shift, int out_shift) {
  if (basis.component_count() != compress::kComponentCount)
    throw Error(Errc::kInvalidConfig, "coefficient memory holds 4 components");
  if (basis.w.size() != compress::kSpikeWindowSamples)
    throw Error(Errc::kInvalidConfig, "coefficient memory holds 22 samples");

  double max_abs = 0.0;
  for (const auto& row : basis.w)
    for (const double v : row) max_abs = std::max(max_abs, std::abs(v));

  compress::QuantizedPcaMemory mem;
  mem.mac_shift = mac_shift;
  mem.out_shift = out_shift;
  mem.scale = max_abs > 0 ? 255.0 / max_abs : 1.0;
  for (int c = 0; c < compress::kComponentCount; ++c)
    for (int i = 0; i < compress::kSpikeWindowSamples; ++i) {
      const auto q = static_cast<long>(std::lround(basis.w[i][c] * mem.scale));
      mem.coefficients[c][i] =
          static_cast<std::int16_t>(std::clamp(q, -256L, 255L));
    }
  mem.validate();
  return mem;
}

std::pair<int, int> select_shifts(const PcaBasis& basis,
                                  const SpikeMatrix& spikes) {
  constexpr int kMaxShift = 16;
  int mac_shift = kMaxShift;
  for (int mac = 0; mac <= kMaxShift; ++mac) {
    const auto mem = quantize_basis(basis, mac, 0);
    std::uint64_t saturations = 0;
    for (const auto& row : spikes) {
      compress::ChannelMemoryEntry entry;
      for (const double x : row) {
        const int code = compress::kBaselineCode +
                         static_cast<int>(std::lround(x));
        entry = compress::mac_step(entry, code, mem, &saturations);
      }
      if (saturations > 0) break;
    }
    if (saturations == 0) {
      mac_shift = mac;
      break;
    }
  }

  const auto probe = quantize_basis(basis, mac_shift, 0);
  std::int32_t max_sum = 0;
  for (const auto& row : spikes) {
    compress::ChannelMemoryEntry entry;
    for (const double x : row) {
      const int code =
          compress::kBaselineCode + static_cast<int>(std::lround(x));
      entry = compress::mac_step(entry, code, probe, nullptr);
    }
    for (const std::int16_t s : entry.running_sums)
      max_sum = std::max(max_sum, static_cast<std::int32_t>(std::abs(s)));
  }
  int out_shift = 0;
  while (out_shift < kMaxShift && (max_sum >> out_shift) > 31) ++out_shift;
  return {mac_shift, out_shift};
}

CalibrationGrid default_grid(int baseline_code) {
  CalibrationGrid grid;
  for (int d = 3; d <= 10; ++d) grid.threshold1.push_back(baseline_code - d);
  for (int d = 5; d <= 12; ++d) grid.threshold2.push_back(baseline_code - d);
  return grid;
}

namespace {

struct GridPoint {
  adc::TriggerConfig trigger;
};

struct PointScore {
  double accuracy = -1.0;
  std::uint64_t digitized = 0;
  int mac_shift = 6;
  int out_shift = 5;
};

// Ground truth indexed per channel for nearest-in-time lookups.
struct GtIndex {
  std::vector<std::vector<std::int64_t>> times;  // [channel], sorted
  std::vector<std::vector<int>> cells;

  GtIndex(const synth::GroundTruth& gt, int channel_count)
      : times(channel_count), cells(channel_count) {
    for (const auto& s : gt.spikes) {
      if (s.channel < 0 || s.channel >= channel_count) continue;
      times[s.channel].push_back(s.time_sample);
      cells[s.channel].push_back(s.cell_id);
    }
  }

  // Cell id of the nearest spike on `channel` within +/- window, else -1.
  int nearest(int channel, std::int64_t t, std::int64_t window) const {
    const auto& ts = times[channel];
    if (ts.empty()) return -1;
    const auto it = std::lower_bound(ts.begin(), ts.end(), t);
    int best = -1;
    std::int64_t best_d = window + 1;
    if (it != ts.end() && *it - t < best_d) {
      best_d = *it - t;
      best = cells[channel][static_cast<std::size_t>(it - ts.begin())];
    }
    if (it != ts.begin()) {
      const auto prev = it - 1;
      if (t - *prev < best_d) {
        best = cells[channel][static_cast<std::size_t>(prev - ts.begin())];
      }
    }
    return best;
  }
};

PointScore evaluate_point(const std::vector<std::vector<std::uint8_t>>& codes,
                          const synth::GroundTruth& gt, const GtIndex& gt_index,
                          const adc::TriggerConfig& trigger,
                          std::int64_t match_window, std::int64_t decimation) {
  const auto replay = pipeline::replay_detector(codes, trigger);
  PointScore score;
  score.digitized = replay.digitized_samples;
  if (replay.windows.size() < 2) {
    score.accuracy = 0.0;
    return score;
  }

  // Label each detected window by its ground-truth match (same channel,
  // nearest in time).
  SpikeMatrix rows;
  rows.reserve(replay.windows.size());
  for (const auto& w : replay.windows) {
    std::vector<double> row(compress::kSpikeWindowSamples, 0.0);
    for (std::size_t i = 0; i < w.codes.size(); ++i)
      row[i] = w.codes[i] - compress::kBaselineCode;
    rows.push_back(std::move(row));
  }

  PcaBasis basis;
  try {
    basis = compute_pca_basis(rows, compress::kComponentCount);
  } catch (const Error&) {
    score.accuracy = 0.0;
    return score;
  }
  const auto [mac, out] = select_shifts(basis, rows);
  score.mac_shift = mac;
  score.out_shift = out;
  const auto mem = quantize_basis(basis, mac, out);

  const int window_length = trigger.window_length();
  std::vector<std::vector<double>> features(replay.windows.size());
  for (std::size_t i = 0; i < replay.windows.size(); ++i) {
    compress::ChannelMemoryEntry entry;
    for (const int code : replay.windows[i].codes)
      entry = compress::mac_step(entry, code, mem, nullptr);
    auto spike = compress::finalize(entry, mem, replay.windows[i].channel, 0,
                                    nullptr, window_length);
    features[i].assign(spike.components.begin(), spike.components.end());
  }

  // Resubstitution labeling: nearest ground-truth spike on the same channel.
  // Ground truth lives in trace samples; windows in sampling periods.
  std::vector<eval::FoundSpike> detections(replay.windows.size());
  for (std::size_t i = 0; i < replay.windows.size(); ++i)
    detections[i] = {replay.windows[i].channel,
                     replay.windows[i].start_period * decimation, -1};
  std::vector<int> truth_label(replay.windows.size(), -1);
  for (std::size_t i = 0; i < replay.windows.size(); ++i)
    truth_label[i] = gt_index.nearest(replay.windows[i].channel,
                                      detections[i].time_sample, match_window);

  std::vector<eval::LabeledFeature> labeled;
  for (std::size_t i = 0; i < replay.windows.size(); ++i)
    if (truth_label[i] >= 0)
      labeled.push_back({truth_label[i], replay.windows[i].channel,
                         features[i]});
  if (labeled.empty()) {
    score.accuracy = 0.0;
    return score;
  }
  const auto centroids = eval::train_centroids(labeled);
  for (std::size_t i = 0; i < replay.windows.size(); ++i)
    detections[i].label =
        eval::classify(features[i], replay.windows[i].channel, centroids);

  score.accuracy = eval::score_sorting(gt, detections, match_window).accuracy;
  return score;
}

}  // namespace

CalibrationResult calibrate(const synth::Recording& recording,
                            const synth::GroundTruth& gt,
                            const CalibrationGrid& grid,
                            const frontend::FrontEndConfig& fe_cfg,
                            const adc::RampConfig& ramp_cfg,
                            double match_window_s, int jobs) {
  if (gt.spikes.size() < 100)
    throw Error(Errc::kInvalidConfig,
                "calibration needs at least 100 ground-truth spikes");

  // Enumerate valid grid points (window must fit the 22-sample memory).
  std::vector<GridPoint> points;
  for (const int t1 : grid.threshold1)
    for (const int t2 : grid.threshold2)
      for (const int n : grid.pretrigger_n)
        for (const int m : grid.posttrigger_m) {
          adc::TriggerConfig trigger;
          trigger.threshold1 = t1;
          trigger.threshold2 = t2;
          trigger.pretrigger_n = n;
          trigger.posttrigger_m = m;
          try {
            trigger.validate(ramp_cfg.code_count());
          } catch (const Error&) {
            continue;
          }
          points.push_back({trigger});
        }
  if (points.empty())
    throw Error(Errc::kEmptyGrid, "no valid grid point");

  pipeline::RunSettings settings;
  settings.frontend = fe_cfg;
  settings.ramp = ramp_cfg;
  const auto codes = pipeline::held_codes(recording, settings);
  const GtIndex gt_index(gt, static_cast<int>(recording.channel_count()));
  // Match in trace-sample units; windows are decimated to sampling periods.
  const auto match_window = static_cast<std::int64_t>(
      std::round(match_window_s * recording.sample_rate_hz));
  const auto decimation = static_cast<std::int64_t>(
      std::round(recording.sample_rate_hz / ramp_cfg.sample_rate_hz));

  std::vector<PointScore> scores(points.size());
  const int workers = std::max(1, jobs);
  if (workers == 1) {
    for (std::size_t i = 0; i < points.size(); ++i)
      scores[i] = evaluate_point(codes, gt, gt_index, points[i].trigger,
                                 match_window, decimation);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < points.size();
             i = next.fetch_add(1))
          scores[i] = evaluate_point(codes, gt, gt_index, points[i].trigger,
                                     match_window, decimation);
      });
    }
    for (auto& th : pool) th.join();
  }

  // Deterministic argmax: best accuracy, then fewer digitized samples, then
  // grid order.
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (scores[i].accuracy > scores[best].accuracy ||
        (scores[i].accuracy == scores[best].accuracy &&
         scores[i].digitized < scores[best].digitized))
      best = i;
  }

  CalibrationResult result;
  result.trigger = points[best].trigger;
  result.accuracy = scores[best].accuracy;
  result.digitized_samples = scores[best].digitized;
  result.mac_shift = scores[best].mac_shift;
  result.out_shift = scores[best].out_shift;
  return result;
}

}  // namespace neuroramp::train
