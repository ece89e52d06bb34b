#include "neuroramp/pipeline.hpp"

#include <algorithm>

#include "neuroramp/rng.hpp"

namespace neuroramp::pipeline {

void RunSettings::validate(int channel_count) const {
  frontend.validate();
  ramp.validate();
  trigger.validate(ramp.code_count());
  if (!pixel_enable.empty() &&
      pixel_enable.size() != static_cast<std::size_t>(channel_count))
    throw Error(Errc::kInvalidConfig, "pixel_enable size/channel mismatch");
}

namespace {

bool channel_on(const RunSettings& s, int channel) {
  return s.pixel_enable.empty() || s.pixel_enable[channel];
}

}  // namespace

std::vector<std::vector<std::uint8_t>> held_codes(
    const synth::Recording& recording, const RunSettings& settings) {
  const int channels = static_cast<int>(recording.channel_count());
  settings.validate(channels);
  const adc::RampTable table(settings.ramp);
  std::vector<std::vector<std::uint8_t>> codes(channels);
  for (int ch = 0; ch < channels; ++ch) {
    const auto amplified =
        frontend::amplify(recording.traces[ch], settings.frontend,
                          recording.sample_rate_hz,
                          mix_seed(settings.noise_seed, ch));
    const auto held = frontend::sample_hold(amplified, recording.sample_rate_hz,
                                            settings.ramp.sample_rate_hz);
    codes[ch].reserve(held.size());
    for (const double v : held)
      codes[ch].push_back(static_cast<std::uint8_t>(table.code_for(v)));
  }
  return codes;
}

RunResult run_detection(const synth::Recording& recording,
                        const RunSettings& settings) {
  const int channels = static_cast<int>(recording.channel_count());
  settings.validate(channels);

  // Analog chain once per channel.
  std::vector<std::vector<double>> held(channels);
  for (int ch = 0; ch < channels; ++ch) {
    const auto amplified =
        frontend::amplify(recording.traces[ch], settings.frontend,
                          recording.sample_rate_hz,
                          mix_seed(settings.noise_seed, ch));
    held[ch] = frontend::sample_hold(amplified, recording.sample_rate_hz,
                                     settings.ramp.sample_rate_hz);
  }
  const std::int64_t periods =
      channels == 0 ? 0 : static_cast<std::int64_t>(held[0].size());

  const adc::RampTable table(settings.ramp);
  const int window = settings.trigger.window_length();

  RunResult result;
  result.period_count = periods;
  std::vector<adc::ChannelTriggerState> detector(channels);
  std::vector<bool> gate(channels, false);
  std::vector<adc::TriggerAction> action(channels, adc::TriggerAction::kIgnore);
  std::vector<double> held_now(channels, 0.0);
  std::vector<SpikeWindow> open_windows(channels);
  std::vector<bool> confirmed(channels, false);

  for (std::int64_t p = 0; p < periods; ++p) {
    // The detector sees the code each comparator would latch this period;
    // only armed/capturing samples are actually read out.
    for (int ch = 0; ch < channels; ++ch) {
      held_now[ch] = held[ch][p];
      if (!channel_on(settings, ch)) {
        gate[ch] = false;
        action[ch] = adc::TriggerAction::kIgnore;
        continue;
      }
      const int code = table.code_for(held_now[ch]);
      action[ch] = adc::dual_threshold_step(detector[ch], code,
                                            settings.trigger);
      gate[ch] = action[ch] == adc::TriggerAction::kDigitize ||
                 action[ch] == adc::TriggerAction::kConfirmSpike;
      if (action[ch] == adc::TriggerAction::kAbortArm) {
        compress::StreamItem item;
        item.channel = ch;
        item.period_index = p;
        item.action = adc::TriggerAction::kAbortArm;
        result.stream.push_back(item);
        open_windows[ch] = SpikeWindow{};
        confirmed[ch] = false;
      }
    }

    const auto period =
        adc::run_ramp_period(held_now, settings.ramp, table, gate, p);
    result.adc_cycles += static_cast<std::uint64_t>(period.cycles_consumed);
    for (const adc::AdcEvent& ev : period.events) {
      result.events.push_back(ev);
      ++result.digitized_samples;

      compress::StreamItem item;
      item.channel = ev.channel;
      item.period_index = p;
      item.code = ev.code;
      item.action = action[ev.channel];
      result.stream.push_back(item);

      SpikeWindow& w = open_windows[ev.channel];
      if (w.codes.empty()) {
        w.channel = ev.channel;
        w.start_period = p;
        confirmed[ev.channel] = false;
      }
      w.codes.push_back(ev.code);
      if (action[ev.channel] == adc::TriggerAction::kConfirmSpike)
        confirmed[ev.channel] = true;
      if (static_cast<int>(w.codes.size()) == window) {
        if (confirmed[ev.channel]) result.windows.push_back(w);
        w = SpikeWindow{};
        confirmed[ev.channel] = false;
      }
    }
  }
  return result;
}

ReplayResult replay_detector(
    const std::vector<std::vector<std::uint8_t>>& codes,
    const adc::TriggerConfig& trigger, const std::vector<bool>& pixel_enable) {
  ReplayResult result;
  const int window = trigger.window_length();
  for (std::size_t ch = 0; ch < codes.size(); ++ch) {
    if (!pixel_enable.empty() && !pixel_enable[ch]) continue;
    adc::ChannelTriggerState state;
    SpikeWindow w;
    bool confirmed = false;
    for (std::size_t p = 0; p < codes[ch].size(); ++p) {
      const auto act = adc::dual_threshold_step(state, codes[ch][p], trigger);
      if (act == adc::TriggerAction::kAbortArm) {
        w = SpikeWindow{};
        confirmed = false;
        continue;
      }
      if (act != adc::TriggerAction::kDigitize &&
          act != adc::TriggerAction::kConfirmSpike)
        continue;
      ++result.digitized_samples;
      if (w.codes.empty()) {
        w.channel = static_cast<int>(ch);
        w.start_period = static_cast<std::int64_t>(p);
      }
      w.codes.push_back(codes[ch][p]);
      if (act == adc::TriggerAction::kConfirmSpike) confirmed = true;
      if (static_cast<int>(w.codes.size()) == window) {
        if (confirmed) result.windows.push_back(w);
        w = SpikeWindow{};
        confirmed = false;
      }
    }
  }
  std::sort(result.windows.begin(), result.windows.end(),
            [](const SpikeWindow& a, const SpikeWindow& b) {
              if (a.start_period != b.start_period)
                return a.start_period < b.start_period;
              return a.channel < b.channel;
            });
  return result;
}

compress::StreamResult compress_run(const RunResult& run,
                                    const compress::QuantizedPcaMemory& mem,
                                    int channel_count, int window_length) {
  return compress::process_stream(run.stream, mem, channel_count,
                                  window_length);
}

std::vector<SpikeWindow> extract_windows(std::span<const adc::AdcEvent> events,
                                         int channel_count,
                                         int window_length) {
  std::vector<SpikeWindow> windows;
  std::vector<SpikeWindow> open(channel_count);
  std::vector<std::int64_t> last_period(channel_count, -2);
  for (const adc::AdcEvent& ev : events) {
    if (ev.channel < 0 || ev.channel >= channel_count)
      throw Error(Errc::kInvalidConfig, "event channel out of range");
    SpikeWindow& w = open[ev.channel];
    if (!w.codes.empty() && ev.period_index != last_period[ev.channel] + 1)
      w = SpikeWindow{};  // gap: aborted arm, too short to be a window
    if (w.codes.empty()) {
      w.channel = ev.channel;
      w.start_period = ev.period_index;
    }
    w.codes.push_back(ev.code);
    last_period[ev.channel] = ev.period_index;
    if (static_cast<int>(w.codes.size()) == window_length) {
      windows.push_back(w);
      w = SpikeWindow{};
    }
  }
  std::sort(windows.begin(), windows.end(),
            [](const SpikeWindow& a, const SpikeWindow& b) {
              if (a.start_period != b.start_period)
                return a.start_period < b.start_period;
              return a.channel < b.channel;
            });
  return windows;
}

}  // namespace neuroramp::pipeline
