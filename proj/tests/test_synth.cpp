#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "neuroramp/synth.hpp"

using namespace neuroramp;
using synth::SynthConfig;

namespace {

SynthConfig small_config() {
  SynthConfig cfg;
  cfg.cell_model_count = 4;
  cfg.recording_duration_s = 1.0;
  cfg.channel_count = 8;
  cfg.rng_seed = 11;
  return cfg;
}

// Direct DFT energy of a real sequence above a cutoff, as a fraction of the
// total (excluding DC).
double energy_fraction_above(const std::vector<double>& x, double fs,
                             double cutoff_hz) {
  const std::size_t n = x.size();
  double total = 0.0, above = 0.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t)
      acc += x[t] * std::polar(1.0, -2.0 * std::numbers::pi *
                                        static_cast<double>(k * t) / n);
    const double power = std::norm(acc);
    total += power;
    if (static_cast<double>(k) * fs / static_cast<double>(n) > cutoff_hz)
      above += power;
  }
  return total > 0 ? above / total : 0.0;
}

}  // namespace

TEST_CASE("template bank has one template per cell model") {
  SynthConfig cfg;
  cfg.cell_model_count = 130;
  cfg.rng_seed = 3;
  const auto bank = synth::generate_templates(cfg);
  CHECK(bank.cells.size() == 130);
  for (const auto& cell : bank.cells) {
    CHECK(cell.waveform_v.size() >= 22);
    double min_v = 0.0, max_v = 0.0;
    for (const double v : cell.waveform_v) {
      min_v = std::min(min_v, v);
      max_v = std::max(max_v, v);
    }
    CHECK(min_v < -25e-6);  // trough depth at least 30 uV by construction
    CHECK(max_v > 0.0);     // positive repolarization peak
  }
}

TEST_CASE("template generation is deterministic per seed") {
  const auto cfg = small_config();
  const auto a = synth::generate_templates(cfg);
  const auto b = synth::generate_templates(cfg);
  CHECK(a.serialize() == b.serialize());

  auto other = cfg;
  other.rng_seed = 12;
  const auto c = synth::generate_templates(other);
  CHECK(a.serialize() != c.serialize());
}

TEST_CASE("template spectra stay inside the configured band") {
  auto cfg = small_config();
  cfg.cell_model_count = 12;
  const auto bank = synth::generate_templates(cfg);
  for (const auto& cell : bank.cells) {
    const double above = energy_fraction_above(cell.waveform_v,
                                               cfg.sample_rate_hz,
                                               cfg.band_high_hz);
    CHECK(above <= 0.01);
  }
}

TEST_CASE("rejects zero cell models") {
  auto cfg = small_config();
  cfg.cell_model_count = 0;
  CHECK_THROWS_AS(synth::generate_templates(cfg), Error);
}

TEST_CASE("20 s at 20 kHz yields 400000 samples per channel") {
  SynthConfig cfg;
  cfg.cell_model_count = 1;
  cfg.channel_count = 2;
  cfg.recording_duration_s = 20.0;
  cfg.mean_spike_rate_hz = 1.0;
  cfg.rng_seed = 5;
  const auto bank = synth::generate_templates(cfg);
  const auto [rec, gt] = synth::generate_recording(cfg, bank);
  CHECK(rec.sample_count() == 400000);
  CHECK(rec.channel_count() == 2);
}

TEST_CASE("null case: no noise and no spikes gives silence") {
  auto cfg = small_config();
  cfg.noise_rms_v = 0.0;
  cfg.mean_spike_rate_hz = 0.0;
  const auto bank = synth::generate_templates(cfg);
  const auto [rec, gt] = synth::generate_recording(cfg, bank);
  CHECK(gt.spikes.empty());
  for (const auto& trace : rec.traces)
    for (const double v : trace) CHECK(v == 0.0);
}

TEST_CASE("rejects durations that round to zero samples") {
  auto cfg = small_config();
  cfg.recording_duration_s = 1e-9;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("spike counts follow the configured rate (1000 seeds)") {
  SynthConfig cfg;
  cfg.cell_model_count = 1;
  cfg.channel_count = 1;
  cfg.recording_duration_s = 20.0;
  cfg.mean_spike_rate_hz = 20.0;
  cfg.noise_rms_v = 0.0;
  int within = 0;
  const int trials = 1000;
  for (int seed = 0; seed < trials; ++seed) {
    cfg.rng_seed = static_cast<std::uint64_t>(seed);
    const auto bank = synth::generate_templates(cfg);
    const auto [rec, gt] = synth::generate_recording(cfg, bank);
    const auto count = static_cast<double>(gt.spikes.size());
    if (std::abs(count - 400.0) <= 3.0 * std::sqrt(400.0)) ++within;
  }
  CHECK(within >= trials * 99 / 100);
}

TEST_CASE("ground truth is sorted and respects the refractory gap") {
  auto cfg = small_config();
  cfg.recording_duration_s = 5.0;
  const auto bank = synth::generate_templates(cfg);
  const auto [rec, gt] = synth::generate_recording(cfg, bank);
  const auto gap_samples = static_cast<std::int64_t>(
      std::floor(cfg.refractory_s * cfg.sample_rate_hz));
  std::vector<std::int64_t> last(cfg.cell_model_count, -1);
  std::int64_t prev = 0;
  for (const auto& s : gt.spikes) {
    CHECK(s.time_sample >= prev);
    prev = s.time_sample;
    CHECK(s.time_sample >= 0);
    CHECK(s.time_sample < rec.sample_count());
    if (last[s.cell_id] >= 0)
      CHECK(s.time_sample - last[s.cell_id] >= gap_samples);
    last[s.cell_id] = s.time_sample;
  }
}

TEST_CASE("noise-free recording equals the exact template superposition") {
  auto cfg = small_config();
  cfg.noise_rms_v = 0.0;
  const auto bank = synth::generate_templates(cfg);
  const auto [rec, gt] = synth::generate_recording(cfg, bank);

  std::vector<std::vector<double>> expected(
      cfg.channel_count,
      std::vector<double>(static_cast<std::size_t>(cfg.sample_count()), 0.0));
  for (const auto& s : gt.spikes) {
    const auto& cell = bank.cells[static_cast<std::size_t>(s.cell_id)];
    for (int ch = 0; ch < cfg.channel_count; ++ch) {
      const double w = cell.channel_weights[ch];
      if (w == 0.0) continue;
      const std::int64_t start = s.time_sample - cell.trough_index;
      for (std::size_t j = 0; j < cell.waveform_v.size(); ++j) {
        const std::int64_t idx = start + static_cast<std::int64_t>(j);
        if (idx >= 0 && idx < cfg.sample_count())
          expected[ch][static_cast<std::size_t>(idx)] += w * cell.waveform_v[j];
      }
    }
  }
  for (int ch = 0; ch < cfg.channel_count; ++ch)
    for (std::size_t i = 0; i < expected[ch].size(); ++i) {
      const double scale = std::max(1e-30, std::abs(expected[ch][i]));
      CHECK(std::abs(rec.traces[ch][i] - expected[ch][i]) <= 1e-12 * scale);
    }
}

TEST_CASE("measured noise RMS matches the configured level") {
  SynthConfig cfg;
  cfg.cell_model_count = 1;
  cfg.channel_count = 3;
  cfg.recording_duration_s = 1.0;
  cfg.mean_spike_rate_hz = 0.0;  // spike-free
  cfg.noise_rms_v = 10e-6;
  cfg.rng_seed = 77;
  const auto bank = synth::generate_templates(cfg);
  const auto [rec, gt] = synth::generate_recording(cfg, bank);
  for (const auto& trace : rec.traces) {
    double acc = 0.0;
    for (const double v : trace) acc += v * v;
    const double rms = std::sqrt(acc / static_cast<double>(trace.size()));
    CHECK(rms == doctest::Approx(10e-6).epsilon(0.05));
  }
}

TEST_CASE("recordings are deterministic in (config, seed)") {
  const auto cfg = small_config();
  const auto bank = synth::generate_templates(cfg);
  const auto [rec_a, gt_a] = synth::generate_recording(cfg, bank);
  const auto [rec_b, gt_b] = synth::generate_recording(cfg, bank);
  CHECK(rec_a.traces == rec_b.traces);
  REQUIRE(gt_a.spikes.size() == gt_b.spikes.size());
  for (std::size_t i = 0; i < gt_a.spikes.size(); ++i) {
    CHECK(gt_a.spikes[i].cell_id == gt_b.spikes[i].cell_id);
    CHECK(gt_a.spikes[i].time_sample == gt_b.spikes[i].time_sample);
  }
}
