#include "neuroramp/adc.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace neuroramp::adc {

void RampConfig::validate() const {
  if (resolution_bits < 1 || resolution_bits > 16)
    throw Error(Errc::kInvalidConfig, "resolution_bits out of range");
  if (!(full_scale_max_v > full_scale_min_v))
    throw Error(Errc::kInvalidConfig, "full scale must have positive width");
  if (!(clock_hz > 0) || !(sample_rate_hz > 0))
    throw Error(Errc::kInvalidConfig, "clock and sample rate must be positive");
  const double cycles = clock_hz / sample_rate_hz;
  if (std::abs(cycles - std::round(cycles)) > 1e-9)
    throw Error(Errc::kInvalidConfig,
                "clock_hz must be an integer multiple of sample_rate_hz");
  if (code_count() > static_cast<int>(std::round(cycles)))
    throw Error(Errc::kInvalidConfig,
                "every code must be reachable within one sampling period");
  if (!dnl_profile_lsb.empty() &&
      dnl_profile_lsb.size() != static_cast<std::size_t>(code_count()))
    throw Error(Errc::kInvalidConfig, "dnl_profile size must be 2^bits");
}

int quantize_ideal(double voltage_v, const RampConfig& cfg) {
  const double lsb = cfg.lsb_v();
  const double rel = voltage_v - cfg.full_scale_min_v;
  if (!(rel > 0.0)) return 0;
  if (rel >= cfg.full_scale_max_v - cfg.full_scale_min_v)
    return cfg.code_count() - 1;
  const int code = static_cast<int>(std::floor(rel / lsb));
  return std::min(code, cfg.code_count() - 1);
}

RampTable::RampTable(const RampConfig& cfg) : min_v_(cfg.full_scale_min_v) {
  cfg.validate();
  const double lsb = cfg.lsb_v();
  edges_.resize(cfg.code_count());
  double acc = 0.0;
  for (int k = 0; k < cfg.code_count(); ++k) {
    const double err = cfg.dnl_profile_lsb.empty() ? 0.0 : cfg.dnl_profile_lsb[k];
    acc += lsb * (1.0 + err);
    edges_[k] = acc;
  }
}

int RampTable::code_for(double voltage_v) const {
  const double rel = voltage_v - min_v_;
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), rel);
  if (it == edges_.end()) return static_cast<int>(edges_.size()) - 1;
  return static_cast<int>(it - edges_.begin());
}

RampPeriodResult run_ramp_period(std::span<const double> held_v,
                                 const RampConfig& cfg,
                                 const std::vector<bool>& digitize_enable,
                                 std::int64_t period_index) {
  const RampTable table(cfg);
  return run_ramp_period(held_v, cfg, table, digitize_enable, period_index);
}

RampPeriodResult run_ramp_period(std::span<const double> held_v,
                                 const RampConfig& cfg, const RampTable& table,
                                 const std::vector<bool>& digitize_enable,
                                 std::int64_t period_index) {
  if (held_v.size() != digitize_enable.size())
    throw Error(Errc::kLengthMismatch, "held/gating size mismatch");

  // Channels grouped by crossing step; map keeps steps ascending and
  // vectors keep addresses ascending (channels visited in order).
  std::map<int, std::vector<int>> crossers;
  for (std::size_t ch = 0; ch < held_v.size(); ++ch) {
    if (!digitize_enable[ch]) continue;
    crossers[table.code_for(held_v[ch])].push_back(static_cast<int>(ch));
  }

  RampPeriodResult result;
  int stall_offset = 0;
  int max_step = 0;
  for (const auto& [step, channels] : crossers) {
    max_step = step;
    for (std::size_t i = 0; i < channels.size(); ++i) {
      AdcEvent ev;
      ev.channel = channels[i];
      ev.code = step;
      ev.period_index = period_index;
      ev.ramp_cycle = step + stall_offset + static_cast<int>(i);
      result.events.push_back(ev);
    }
    stall_offset += static_cast<int>(channels.size()) - 1;
  }
  result.collision_stalls = stall_offset;
  result.cycles_consumed = result.events.empty() ? 0 : max_step + stall_offset;
  if (result.cycles_consumed > cfg.cycles_per_period())
    throw Error(Errc::kPeriodOverrun,
                "ramp period needs " + std::to_string(result.cycles_consumed) +
                    " cycles, budget is " +
                    std::to_string(cfg.cycles_per_period()));
  return result;
}

void TriggerConfig::validate(int code_count) const {
  auto in_range = [code_count](int t) { return t >= 0 && t < code_count; };
  if (!in_range(threshold1) || !in_range(threshold2))
    throw Error(Errc::kInvalidConfig, "threshold outside code range");
  if (polarity == Polarity::kNegativeGoing ? threshold2 > threshold1
                                           : threshold2 < threshold1)
    throw Error(Errc::kInvalidConfig,
                "threshold2 must be at least as extreme as threshold1");
  if (pretrigger_n < 0 || posttrigger_m < 1)
    throw Error(Errc::kInvalidConfig, "pretrigger_n >= 0, posttrigger_m >= 1");
  if (window_length() > 22)
    throw Error(Errc::kInvalidConfig,
                "pretrigger_n + posttrigger_m must not exceed the 22-sample "
                "spike window");
}

TriggerAction dual_threshold_step(ChannelTriggerState& state, int code,
                                  const TriggerConfig& cfg) {
  const int window = cfg.window_length();
  switch (state.phase) {
    case DetectorPhase::kIdle:
      if (!cfg.beyond(code, cfg.threshold1)) return TriggerAction::kIgnore;
      state.samples_since_arm = 0;
      state.samples_since_confirm = 0;
      if (cfg.beyond(code, cfg.threshold2)) {
        // Arming sample already passes the confirm threshold.
        state.phase = DetectorPhase::kCapturing;
        if (window == 1) state.reset();
        return TriggerAction::kConfirmSpike;
      }
      state.phase = DetectorPhase::kArmed;
      return TriggerAction::kDigitize;

    case DetectorPhase::kArmed:
      ++state.samples_since_arm;
      if (cfg.beyond(code, cfg.threshold2)) {
        state.phase = DetectorPhase::kCapturing;
        if (state.samples_since_arm + 1 >= window) state.reset();
        return TriggerAction::kConfirmSpike;
      }
      if (state.samples_since_arm >= cfg.pretrigger_n) {
        state.reset();
        return TriggerAction::kAbortArm;
      }
      return TriggerAction::kDigitize;

    case DetectorPhase::kCapturing:
      ++state.samples_since_arm;
      ++state.samples_since_confirm;
      if (state.samples_since_arm + 1 >= window) state.reset();
      return TriggerAction::kDigitize;
  }
  return TriggerAction::kIgnore;  // unreachable
}

std::vector<std::uint64_t> code_histogram(const RampConfig& cfg,
                                          std::span<const double> injected_v) {
  const RampTable table(cfg);
  std::vector<std::uint64_t> hits(cfg.code_count(), 0);
  for (const double v : injected_v) ++hits[table.code_for(v)];
  return hits;
}

std::vector<std::uint64_t> code_density_capture(const RampConfig& cfg,
                                                double sweep_duration_s,
                                                int repetitions) {
  cfg.validate();
  if (repetitions < 1)
    throw Error(Errc::kInvalidConfig, "repetitions must be >= 1");
  if (!(sweep_duration_s > 0))
    throw Error(Errc::kInvalidConfig, "sweep duration must be positive");

  const auto samples_per_rep =
      static_cast<std::int64_t>(std::round(sweep_duration_s * cfg.sample_rate_hz));
  const double span = cfg.full_scale_max_v - cfg.full_scale_min_v;
  const RampTable table(cfg);
  std::vector<std::uint64_t> hits(cfg.code_count(), 0);
  for (int rep = 0; rep < repetitions; ++rep) {
    // Sub-sample phase dither so repeated sweeps tile the step edges.
    const double phase = static_cast<double>(rep) / repetitions;
    for (std::int64_t k = 0; k < samples_per_rep; ++k) {
      const double t = (static_cast<double>(k) + phase) / samples_per_rep;
      ++hits[table.code_for(cfg.full_scale_min_v + t * span)];
    }
  }
  return hits;
}

}  // namespace neuroramp::adc
