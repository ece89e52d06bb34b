#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "neuroramp/errors.hpp"

namespace neuroramp::adc {

// Shared single-slope ramp converter. One global counter sweeps the full
// scale once per sampling period; every enabled channel latches the counter
// value when the ramp crosses its held voltage.
struct RampConfig {
  int resolution_bits = 8;
  double full_scale_min_v = 0.0;
  double full_scale_max_v = 1.0;
  double clock_hz = 16e6;
  double sample_rate_hz = 20e3;
  // Optional per-code step-width error in LSB (models capacitor mismatch).
  // Empty means ideal. Size must be 2^resolution_bits when present.
  std::vector<double> dnl_profile_lsb;

  int code_count() const { return 1 << resolution_bits; }
  double lsb_v() const {
    return (full_scale_max_v - full_scale_min_v) / code_count();
  }
  // Clock cycles available per sampling period (800 at the defaults).
  int cycles_per_period() const {
    return static_cast<int>(clock_hz / sample_rate_hz);
  }
  void validate() const;
};

// Reference quantizer: ideal uniform mid-rise-at-zero transfer,
// code = floor((v - min) / LSB) clamped to the code range. Kept independent
// of the ramp crossing model below so the two can cross-check each other.
int quantize_ideal(double voltage_v, const RampConfig& cfg);

// Ramp step-edge table including any injected DNL profile. Step k spans
// [edge(k), edge(k+1)) volts above full_scale_min; a channel crosses at the
// first step whose upper edge exceeds its held voltage.
class RampTable {
 public:
  explicit RampTable(const RampConfig& cfg);
  int code_for(double voltage_v) const;
  double upper_edge_v(int code) const { return edges_[code]; }

 private:
  std::vector<double> edges_;  // upper edge of each step, relative to min
  double min_v_;
};

struct AdcEvent {
  int channel = 0;
  int code = 0;
  std::int64_t period_index = 0;
  int ramp_cycle = 0;  // clock cycle within the period the code latched at
};

struct RampPeriodResult {
  std::vector<AdcEvent> events;  // emission order
  int cycles_consumed = 0;       // max crossing step + collision stalls
  int collision_stalls = 0;
};

// Digitizes one sampling period. `held_v` carries one voltage per channel;
// `digitize_enable` selects which channels latch an event this period.
// Simultaneous crossings pause the ramp and resolve in ascending channel
// address, one extra clock cycle per additional channel.
// Throws kPeriodOverrun when the cycle budget is exceeded.
RampPeriodResult run_ramp_period(std::span<const double> held_v,
                                 const RampConfig& cfg,
                                 const std::vector<bool>& digitize_enable,
                                 std::int64_t period_index);

// Same, with a prebuilt step table (long runs digitize many periods against
// one ramp).
RampPeriodResult run_ramp_period(std::span<const double> held_v,
                                 const RampConfig& cfg, const RampTable& table,
                                 const std::vector<bool>& digitize_enable,
                                 std::int64_t period_index);

enum class Polarity { kNegativeGoing, kPositiveGoing };

// Dual-threshold trigger. Arm when a code passes threshold1; confirm a spike
// only if threshold2 is passed within pretrigger_n samples after arming,
// otherwise reset. A confirmed capture spans exactly window_length() samples
// starting at the arming sample, so the downstream 5-bit sample index and the
// 22-deep coefficient memory always see full windows.
struct TriggerConfig {
  int threshold1 = 120;
  int threshold2 = 118;
  int pretrigger_n = 3;
  int posttrigger_m = 19;
  Polarity polarity = Polarity::kNegativeGoing;

  int window_length() const { return pretrigger_n + posttrigger_m; }
  bool beyond(int code, int threshold) const {
    return polarity == Polarity::kNegativeGoing ? code <= threshold
                                                : code >= threshold;
  }
  void validate(int code_count = 256) const;
};

enum class DetectorPhase : std::uint8_t { kIdle = 0, kArmed = 1, kCapturing = 2 };

struct ChannelTriggerState {
  DetectorPhase phase = DetectorPhase::kIdle;
  // Samples seen since the arming sample (drives the threshold2 deadline
  // while armed, and window completion while capturing).
  int samples_since_arm = 0;
  int samples_since_confirm = 0;

  void reset() { *this = ChannelTriggerState{}; }
  bool idle() const { return phase == DetectorPhase::kIdle; }
};

enum class TriggerAction : std::uint8_t {
  kIgnore = 0,       // below threshold1, nothing digitized
  kDigitize = 1,     // sample digitized and forwarded
  kConfirmSpike = 2, // sample digitized; capture confirmed
  kAbortArm = 3,     // deadline missed; pending partial window is discarded
};

// Advances one channel's trigger state with this period's code.
TriggerAction dual_threshold_step(ChannelTriggerState& state, int code,
                                  const TriggerConfig& cfg);

// Code-density capture: repeatedly digitize a slow full-scale sweep and
// histogram the hit count per output code. Each repetition is phase-dithered
// by a sub-sample offset so step edges are sampled uniformly.
std::vector<std::uint64_t> code_density_capture(const RampConfig& cfg,
                                                double sweep_duration_s,
                                                int repetitions);

// Histogram of an arbitrary injected signal (building block of the above).
std::vector<std::uint64_t> code_histogram(const RampConfig& cfg,
                                          std::span<const double> injected_v);

}  // namespace neuroramp::adc
