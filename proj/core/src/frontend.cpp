#include "neuroramp/frontend.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "neuroramp/rng.hpp"

namespace neuroramp::frontend {

namespace {

struct FilterCoefficients {
  double hp_a;  // y[n] = a*(y[n-1] + x[n] - x[n-1])
  double lp_b;  // y[n] = y[n-1] + b*(x[n] - y[n-1])
};

FilterCoefficients make_coefficients(const FrontEndConfig& cfg, double fs) {
  const double dt = 1.0 / fs;
  const double whp = 2.0 * std::numbers::pi * cfg.band_low_hz;
  const double wlp = 2.0 * std::numbers::pi * cfg.band_high_hz;
  return {1.0 / (1.0 + whp * dt), (wlp * dt) / (1.0 + wlp * dt)};
}

double reference_hz(const FrontEndConfig& cfg) {
  if (cfg.gain_ref_hz > cfg.band_low_hz && cfg.gain_ref_hz < cfg.band_high_hz)
    return cfg.gain_ref_hz;
  return std::sqrt(cfg.band_low_hz * cfg.band_high_hz);
}

}  // namespace

void FrontEndConfig::validate() const {
  if (!(band_low_hz > 0) || !(band_low_hz < band_high_hz))
    throw Error(Errc::kInvalidConfig, "need 0 < band_low < band_high");
  if (!(output_max_v > output_min_v))
    throw Error(Errc::kInvalidConfig, "output range must have positive width");
  if (baseline_v < output_min_v || baseline_v > output_max_v)
    throw Error(Errc::kInvalidConfig, "baseline outside output range");
  if (input_noise_rms_v < 0)
    throw Error(Errc::kInvalidConfig, "noise RMS must be >= 0");
}

double FrontEndConfig::gain_linear() const {
  return std::pow(10.0, gain_db / 20.0);
}

double cascade_response(const FrontEndConfig& cfg, double trace_rate_hz,
                        double at_hz) {
  const auto [a, b] = make_coefficients(cfg, trace_rate_hz);
  const double w = 2.0 * std::numbers::pi * at_hz / trace_rate_hz;
  const double cw = std::cos(w);
  const double hp2 =
      a * a * (2.0 - 2.0 * cw) / (1.0 - 2.0 * a * cw + a * a);
  const double c = 1.0 - b;
  const double lp2 = b * b / (1.0 - 2.0 * c * cw + c * c);
  return std::sqrt(hp2 * lp2);
}

namespace {

// RMS transmission of discrete white noise through the reference-normalized
// cascade. Scaling the injected white source by 1/this makes the output
// noise, referred back through the mid-band gain, equal the configured RMS.
double noise_bandwidth_factor(const FrontEndConfig& cfg, double trace_rate_hz) {
  const double norm = cascade_response(cfg, trace_rate_hz, reference_hz(cfg));
  constexpr int kPoints = 2048;
  double acc = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double f = (i + 0.5) * (trace_rate_hz / 2.0) / kPoints;
    const double h = cascade_response(cfg, trace_rate_hz, f) / norm;
    acc += h * h;
  }
  return std::sqrt(acc / kPoints);
}

}  // namespace

std::vector<double> amplify(std::span<const double> trace_v,
                            const FrontEndConfig& cfg, double trace_rate_hz,
                            std::uint64_t noise_seed) {
  cfg.validate();
  if (!(trace_rate_hz > 2.0 * cfg.band_high_hz))
    throw Error(Errc::kInvalidConfig,
                "trace rate must exceed twice the upper band edge");

  const auto [a, b] = make_coefficients(cfg, trace_rate_hz);
  const double norm = cascade_response(cfg, trace_rate_hz, reference_hz(cfg));
  const double gain = cfg.gain_linear() / norm;
  const double noise_sigma =
      cfg.input_noise_rms_v > 0
          ? cfg.input_noise_rms_v / noise_bandwidth_factor(cfg, trace_rate_hz)
          : 0.0;

  Rng noise(noise_seed);
  std::vector<double> out(trace_v.size());
  double hp_y = 0.0, hp_x1 = 0.0, lp_y = 0.0;
  for (std::size_t n = 0; n < trace_v.size(); ++n) {
    double x = trace_v[n];
    if (noise_sigma > 0) x += noise_sigma * noise.gaussian();
    hp_y = a * (hp_y + x - hp_x1);
    hp_x1 = x;
    lp_y += b * (hp_y - lp_y);
    out[n] = std::clamp(cfg.baseline_v + gain * lp_y, cfg.output_min_v,
                        cfg.output_max_v);
  }
  return out;
}

std::vector<double> sample_hold(std::span<const double> amplified_v,
                                double trace_rate_hz, double sample_rate_hz) {
  if (!(sample_rate_hz > 0) || !(trace_rate_hz > 0))
    throw Error(Errc::kInvalidConfig, "rates must be positive");
  const double ratio = trace_rate_hz / sample_rate_hz;
  const auto decimation = static_cast<std::int64_t>(std::round(ratio));
  if (decimation < 1 || std::abs(ratio - static_cast<double>(decimation)) > 1e-9)
    throw Error(Errc::kInvalidConfig,
                "trace rate must be an integer multiple of the sample rate");
  std::vector<double> held;
  held.reserve(amplified_v.size() / decimation + 1);
  for (std::size_t n = 0; n < amplified_v.size();
       n += static_cast<std::size_t>(decimation))
    held.push_back(amplified_v[n]);
  return held;
}

}  // namespace neuroramp::frontend
