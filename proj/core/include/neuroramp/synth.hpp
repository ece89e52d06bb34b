#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "neuroramp/errors.hpp"

namespace neuroramp::synth {

struct SynthConfig {
  int cell_model_count = 130;
  double recording_duration_s = 20.0;
  double noise_rms_v = 10e-6;  // input-referred, band-limited
  double band_low_hz = 500.0;
  double band_high_hz = 6000.0;
  double mean_spike_rate_hz = 20.0;  // per neuron
  double sample_rate_hz = 20e3;
  int channel_count = 49;
  std::uint64_t rng_seed = 0;

  // Hard gap between consecutive spikes of one cell. The inter-spike
  // distribution is exponential on top of this gap, with the rate adjusted so
  // the realized mean rate stays at mean_spike_rate_hz.
  double refractory_s = 2e-3;

  std::int64_t sample_count() const;
  void validate() const;
};

// One cell's action-potential shape plus its electrode footprint.
struct CellTemplate {
  int cell_id = 0;
  std::vector<double> waveform_v;  // volts at sample_rate, trough < 0
  int trough_index = 0;
  int dominant_channel = 0;
  std::vector<double> channel_weights;  // one weight per channel
};

struct TemplateBank {
  std::vector<CellTemplate> cells;
  double sample_rate_hz = 0.0;

  // Canonical byte image (little-endian doubles); determinism checks compare
  // two banks through this.
  std::vector<std::uint8_t> serialize() const;
};

struct Recording {
  std::vector<std::vector<double>> traces;  // [channel][sample], volts
  double sample_rate_hz = 0.0;

  std::size_t channel_count() const { return traces.size(); }
  std::size_t sample_count() const {
    return traces.empty() ? 0 : traces[0].size();
  }
};

struct GroundTruthSpike {
  int cell_id = 0;
  std::int64_t time_sample = 0;  // template trough position
  int channel = 0;               // dominant channel
};

struct GroundTruth {
  std::vector<GroundTruthSpike> spikes;  // sorted by time
};

// Parametric biphasic templates (negative trough, smaller positive
// repolarization bump, zero net area), randomized per cell and band-limited
// by construction. Deterministic in (config, rng_seed).
TemplateBank generate_templates(const SynthConfig& cfg);

// Convolves each cell's template with its spike train and adds band-limited
// Gaussian noise at the configured RMS. Every placed spike is recorded in the
// returned ground truth.
std::pair<Recording, GroundTruth> generate_recording(const SynthConfig& cfg,
                                                     const TemplateBank& bank);

}  // namespace neuroramp::synth
