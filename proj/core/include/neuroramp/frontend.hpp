#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "neuroramp/errors.hpp"

namespace neuroramp::frontend {

// Behavioral model of the DC-coupled low-noise amplifier and sample-and-hold:
// input-referred noise, first-order band-pass, mid-band gain, output clamp.
struct FrontEndConfig {
  double gain_db = 54.6;
  double band_low_hz = 500.0;
  double band_high_hz = 9200.0;
  double input_noise_rms_v = 15.8e-6;
  double output_min_v = 0.0;
  double output_max_v = 1.0;
  double baseline_v = 0.5;
  // Frequency at which the stated gain is realized. The first-order corners
  // shave a few dB inside the band, so the cascade is normalized to unity at
  // this reference (falls back to the geometric band center if the reference
  // lies outside the band).
  double gain_ref_hz = 1000.0;

  void validate() const;
  double gain_linear() const;
};

// Magnitude response of the discrete first-order high-pass/low-pass cascade
// at `at_hz`, before normalization. Exposed for gain calibration and tests.
double cascade_response(const FrontEndConfig& cfg, double trace_rate_hz,
                        double at_hz);

// Full amplifier step: add input-referred noise (when configured), band-pass,
// apply normalized gain around the baseline, clamp to the output range.
// Deterministic for a given noise_seed; noise-free when input_noise_rms_v==0.
std::vector<double> amplify(std::span<const double> trace_v,
                            const FrontEndConfig& cfg, double trace_rate_hz,
                            std::uint64_t noise_seed = 0);

// Sample-and-hold: one held value per sampling period, taken at the period
// start. The trace rate must be an integer multiple of the sample rate.
std::vector<double> sample_hold(std::span<const double> amplified_v,
                                double trace_rate_hz, double sample_rate_hz);

}  // namespace neuroramp::frontend
