#include "neuroramp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "neuroramp/rng.hpp"

namespace neuroramp::synth {

namespace {

constexpr std::uint64_t kTemplateSalt = 0x7E3A11;
constexpr std::uint64_t kTrainSalt = 0x59A1CE;
constexpr std::uint64_t kNoiseSalt = 0x401C5E;

void append_doubles(std::vector<std::uint8_t>& out,
                    const std::vector<double>& values) {
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(values.data());
  out.insert(out.end(), bytes, bytes + values.size() * sizeof(double));
}

// First-order band-pass used for noise shaping; mirrors the front-end
// sections so the synthetic noise lives in the recording band.
void bandpass_inplace(std::vector<double>& x, double fs, double f_lo,
                      double f_hi) {
  const double dt = 1.0 / fs;
  const double a = 1.0 / (1.0 + 2.0 * std::numbers::pi * f_lo * dt);
  const double wb = 2.0 * std::numbers::pi * f_hi * dt;
  const double b = wb / (1.0 + wb);
  double hp_y = 0.0, hp_x1 = 0.0, lp_y = 0.0;
  for (double& v : x) {
    hp_y = a * (hp_y + v - hp_x1);
    hp_x1 = v;
    lp_y += b * (hp_y - lp_y);
    v = lp_y;
  }
}

}  // namespace

std::int64_t SynthConfig::sample_count() const {
  return static_cast<std::int64_t>(
      std::round(recording_duration_s * sample_rate_hz));
}

void SynthConfig::validate() const {
  if (cell_model_count < 1)
    throw Error(Errc::kInvalidConfig, "cell_model_count must be >= 1");
  if (!(recording_duration_s > 0) || !(sample_rate_hz > 0) ||
      !(mean_spike_rate_hz >= 0))
    throw Error(Errc::kInvalidConfig, "rates and durations must be positive");
  if (sample_count() < 1)
    throw Error(Errc::kInvalidConfig, "duration yields zero samples");
  if (!(band_low_hz < band_high_hz) || !(band_high_hz < sample_rate_hz / 2))
    throw Error(Errc::kInvalidConfig,
                "need band_low < band_high < sample_rate/2");
  if (noise_rms_v < 0)
    throw Error(Errc::kInvalidConfig, "noise_rms must be >= 0");
  if (channel_count < 1)
    throw Error(Errc::kInvalidConfig, "channel_count must be >= 1");
  if (mean_spike_rate_hz > 0 && refractory_s * mean_spike_rate_hz >= 1.0)
    throw Error(Errc::kInvalidConfig,
                "refractory period incompatible with the mean spike rate");
}

std::vector<std::uint8_t> TemplateBank::serialize() const {
  std::vector<std::uint8_t> out;
  for (const CellTemplate& cell : cells) {
    append_doubles(out, cell.waveform_v);
    append_doubles(out, cell.channel_weights);
    const double meta[3] = {static_cast<double>(cell.cell_id),
                            static_cast<double>(cell.trough_index),
                            static_cast<double>(cell.dominant_channel)};
    const auto* bytes = reinterpret_cast<const std::uint8_t*>(meta);
    out.insert(out.end(), bytes, bytes + sizeof(meta));
  }
  return out;
}

TemplateBank generate_templates(const SynthConfig& cfg) {
  cfg.validate();
  TemplateBank bank;
  bank.sample_rate_hz = cfg.sample_rate_hz;
  bank.cells.reserve(cfg.cell_model_count);

  const double fs = cfg.sample_rate_hz;
  const int length = std::max<int>(22, static_cast<int>(std::round(3.2e-3 * fs)));
  const int trough = static_cast<int>(std::round(0.8e-3 * fs));

  Rng root(cfg.rng_seed);
  for (int id = 0; id < cfg.cell_model_count; ++id) {
    Rng rng = root.fork(mix_seed(kTemplateSalt, static_cast<std::uint64_t>(id)));
    CellTemplate cell;
    cell.cell_id = id;
    cell.trough_index = trough;
    cell.dominant_channel = id % cfg.channel_count;
    cell.channel_weights.assign(cfg.channel_count, 0.0);
    cell.channel_weights[cell.dominant_channel] = 1.0;

    // Biphasic shape: Gaussian trough plus a wider, later Gaussian bump with
    // matched area so the template carries no DC.
    const double trough_sigma = rng.uniform(0.10e-3, 0.22e-3);
    const double bump_sigma = rng.uniform(0.25e-3, 0.45e-3);
    const double bump_delay = rng.uniform(0.5e-3, 0.9e-3);
    const double depth = rng.uniform(30e-6, 150e-6);
    const double bump_over_trough = trough_sigma / bump_sigma;

    cell.waveform_v.assign(length, 0.0);
    double min_v = 0.0;
    for (int n = 0; n < length; ++n) {
      const double t = (n - trough) / fs;
      const double v = -std::exp(-0.5 * t * t / (trough_sigma * trough_sigma)) +
                       bump_over_trough *
                           std::exp(-0.5 * (t - bump_delay) * (t - bump_delay) /
                                    (bump_sigma * bump_sigma));
      cell.waveform_v[n] = v;
      min_v = std::min(min_v, v);
    }
    const double norm = depth / -min_v;
    for (double& v : cell.waveform_v) v *= norm;
    bank.cells.push_back(std::move(cell));
  }
  return bank;
}

std::pair<Recording, GroundTruth> generate_recording(const SynthConfig& cfg,
                                                     const TemplateBank& bank) {
  cfg.validate();
  if (static_cast<int>(bank.cells.size()) != cfg.cell_model_count)
    throw Error(Errc::kInvalidConfig, "bank size does not match config");
  if (bank.sample_rate_hz != cfg.sample_rate_hz)
    throw Error(Errc::kInvalidConfig, "bank sample rate does not match config");
  for (const CellTemplate& cell : bank.cells) {
    if (cell.waveform_v.size() < 22)
      throw Error(Errc::kInvalidConfig, "template shorter than 22 samples");
    if (static_cast<int>(cell.channel_weights.size()) != cfg.channel_count)
      throw Error(Errc::kInvalidConfig, "template weights/channel mismatch");
  }

  const std::int64_t samples = cfg.sample_count();
  Recording rec;
  rec.sample_rate_hz = cfg.sample_rate_hz;
  rec.traces.assign(cfg.channel_count, std::vector<double>(samples, 0.0));
  GroundTruth gt;

  Rng root(cfg.rng_seed);

  // Spike trains: exponential gaps plus a hard refractory gap, with the
  // exponential rate raised so the realized mean rate matches the config.
  if (cfg.mean_spike_rate_hz > 0) {
    const double gap_rate = cfg.mean_spike_rate_hz /
                            (1.0 - cfg.mean_spike_rate_hz * cfg.refractory_s);
    for (const CellTemplate& cell : bank.cells) {
      Rng rng = root.fork(
          mix_seed(kTrainSalt, static_cast<std::uint64_t>(cell.cell_id)));
      double t = rng.exponential(gap_rate);
      while (t < cfg.recording_duration_s) {
        const auto at =
            static_cast<std::int64_t>(std::round(t * cfg.sample_rate_hz));
        if (at >= 0 && at < samples)
          gt.spikes.push_back({cell.cell_id, at, cell.dominant_channel});
        t += cfg.refractory_s + rng.exponential(gap_rate);
      }
    }
    std::sort(gt.spikes.begin(), gt.spikes.end(),
              [](const GroundTruthSpike& a, const GroundTruthSpike& b) {
                if (a.time_sample != b.time_sample)
                  return a.time_sample < b.time_sample;
                return a.cell_id < b.cell_id;
              });
    for (const GroundTruthSpike& spike : gt.spikes) {
      const CellTemplate& cell = bank.cells[spike.cell_id];
      for (int ch = 0; ch < cfg.channel_count; ++ch) {
        const double w = cell.channel_weights[ch];
        if (w == 0.0) continue;
        auto& trace = rec.traces[ch];
        const std::int64_t start = spike.time_sample - cell.trough_index;
        for (std::size_t j = 0; j < cell.waveform_v.size(); ++j) {
          const std::int64_t idx = start + static_cast<std::int64_t>(j);
          if (idx >= 0 && idx < samples) trace[idx] += w * cell.waveform_v[j];
        }
      }
    }
  }

  if (cfg.noise_rms_v > 0) {
    for (int ch = 0; ch < cfg.channel_count; ++ch) {
      Rng rng = root.fork(mix_seed(kNoiseSalt, static_cast<std::uint64_t>(ch)));
      std::vector<double> noise(samples);
      for (double& v : noise) v = rng.gaussian();
      bandpass_inplace(noise, cfg.sample_rate_hz, cfg.band_low_hz,
                       cfg.band_high_hz);
      double power = 0.0;
      for (const double v : noise) power += v * v;
      const double rms = std::sqrt(power / static_cast<double>(samples));
      const double scale = rms > 0 ? cfg.noise_rms_v / rms : 0.0;
      auto& trace = rec.traces[ch];
      for (std::int64_t n = 0; n < samples; ++n) trace[n] += scale * noise[n];
    }
  }

  return {std::move(rec), std::move(gt)};
}

}  // namespace neuroramp::synth
