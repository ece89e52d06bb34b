#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "neuroramp/adc.hpp"
#include "neuroramp/compress.hpp"
#include "neuroramp/frontend.hpp"
#include "neuroramp/synth.hpp"

namespace neuroramp::pipeline {

// Everything needed to run the acquisition chain on one recording.
struct RunSettings {
  frontend::FrontEndConfig frontend;
  adc::RampConfig ramp;
  adc::TriggerConfig trigger;
  // Per-channel enable; empty means all channels on.
  std::vector<bool> pixel_enable;
  std::uint64_t noise_seed = 1;

  void validate(int channel_count) const;
};

// One confirmed detection: the window's digitized codes in order.
struct SpikeWindow {
  int channel = 0;
  std::int64_t start_period = 0;  // period of the arming sample
  std::vector<int> codes;
};

struct RunResult {
  std::vector<adc::AdcEvent> events;         // every digitized sample
  std::vector<compress::StreamItem> stream;  // detector-annotated items
  std::vector<SpikeWindow> windows;          // confirmed windows only
  std::int64_t period_count = 0;
  std::uint64_t digitized_samples = 0;
  std::uint64_t adc_cycles = 0;  // sum of per-period cycles consumed
};

// Full event-driven acquisition: amplify per channel, hold once per sampling
// period, step the per-channel dual-threshold detectors, and digitize gated
// channels through the shared ramp (collision-resolved).
RunResult run_detection(const synth::Recording& recording,
                        const RunSettings& settings);

// Per-channel held codes for every period, detector-independent. Lets a grid
// search replay many trigger configurations without re-running the analog
// chain.
std::vector<std::vector<std::uint8_t>> held_codes(
    const synth::Recording& recording, const RunSettings& settings);

struct ReplayResult {
  std::vector<SpikeWindow> windows;
  std::uint64_t digitized_samples = 0;
};

ReplayResult replay_detector(
    const std::vector<std::vector<std::uint8_t>>& codes,
    const adc::TriggerConfig& trigger,
    const std::vector<bool>& pixel_enable = {});

// Feeds a detection run's stream through the fixed-point compressor.
compress::StreamResult compress_run(const RunResult& run,
                                    const compress::QuantizedPcaMemory& mem,
                                    int channel_count, int window_length);

// Rebuilds confirmed spike windows from a raw event stream: on each channel,
// digitized samples arrive in consecutive-period runs, and every confirmed
// capture contributes exactly window_length of them (aborted arms are
// shorter and are dropped).
std::vector<SpikeWindow> extract_windows(std::span<const adc::AdcEvent> events,
                                         int channel_count, int window_length);

}  // namespace neuroramp::pipeline
