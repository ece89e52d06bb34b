#include "neuroramp/config.hpp"

#include <fstream>

#include <json.hpp>

namespace neuroramp::config {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                         const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known)
      if (key == k) {
        ok = true;
        break;
      }
    if (!ok)
      throw Error(Errc::kInvalidConfig,
                  "unknown key \"" + key + "\" in " + where);
  }
}

template <typename T>
void get_if_present(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void PipelineConfig::validate() const {
  synth.validate();
  frontend.validate();
  ramp.validate();
  trigger.validate(ramp.code_count());
  if (mac_shift < 0 || mac_shift > 16 || out_shift < 0 || out_shift > 16)
    throw Error(Errc::kInvalidConfig, "shift out of range");
  if (mode != "raw" && mode != "compressed")
    throw Error(Errc::kInvalidConfig, "mode must be raw|compressed");
  if (!pixel_enable.empty() &&
      pixel_enable.size() != static_cast<std::size_t>(synth.channel_count))
    throw Error(Errc::kInvalidConfig, "pixel_enable size/channel mismatch");
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::kIoError, path.string() + ": " + e.what());
  }

  reject_unknown_keys(j,
                      {"synth", "frontend", "adc", "trigger", "compress",
                       "mode", "rng_seed", "pixel_enable"},
                      "config root");
  PipelineConfig cfg;

  if (j.contains("synth")) {
    const json& s = j["synth"];
    reject_unknown_keys(s,
                        {"cell_model_count", "recording_duration_s",
                         "noise_rms_v", "band_low_hz", "band_high_hz",
                         "mean_spike_rate_hz", "sample_rate_hz",
                         "channel_count", "refractory_s"},
                        "synth");
    get_if_present(s, "cell_model_count", cfg.synth.cell_model_count);
    get_if_present(s, "recording_duration_s", cfg.synth.recording_duration_s);
    get_if_present(s, "noise_rms_v", cfg.synth.noise_rms_v);
    get_if_present(s, "band_low_hz", cfg.synth.band_low_hz);
    get_if_present(s, "band_high_hz", cfg.synth.band_high_hz);
    get_if_present(s, "mean_spike_rate_hz", cfg.synth.mean_spike_rate_hz);
    get_if_present(s, "sample_rate_hz", cfg.synth.sample_rate_hz);
    get_if_present(s, "channel_count", cfg.synth.channel_count);
    get_if_present(s, "refractory_s", cfg.synth.refractory_s);
  }

  if (j.contains("frontend")) {
    const json& f = j["frontend"];
    reject_unknown_keys(f,
                        {"gain_db", "band_low_hz", "band_high_hz",
                         "input_noise_rms_v", "output_min_v", "output_max_v",
                         "baseline_v", "gain_ref_hz"},
                        "frontend");
    get_if_present(f, "gain_db", cfg.frontend.gain_db);
    get_if_present(f, "band_low_hz", cfg.frontend.band_low_hz);
    get_if_present(f, "band_high_hz", cfg.frontend.band_high_hz);
    get_if_present(f, "input_noise_rms_v", cfg.frontend.input_noise_rms_v);
    get_if_present(f, "output_min_v", cfg.frontend.output_min_v);
    get_if_present(f, "output_max_v", cfg.frontend.output_max_v);
    get_if_present(f, "baseline_v", cfg.frontend.baseline_v);
    get_if_present(f, "gain_ref_hz", cfg.frontend.gain_ref_hz);
  }

  if (j.contains("adc")) {
    const json& a = j["adc"];
    reject_unknown_keys(a,
                        {"resolution_bits", "full_scale_min_v",
                         "full_scale_max_v", "clock_hz", "sample_rate_hz",
                         "dnl_profile_lsb"},
                        "adc");
    get_if_present(a, "resolution_bits", cfg.ramp.resolution_bits);
    get_if_present(a, "full_scale_min_v", cfg.ramp.full_scale_min_v);
    get_if_present(a, "full_scale_max_v", cfg.ramp.full_scale_max_v);
    get_if_present(a, "clock_hz", cfg.ramp.clock_hz);
    get_if_present(a, "sample_rate_hz", cfg.ramp.sample_rate_hz);
    get_if_present(a, "dnl_profile_lsb", cfg.ramp.dnl_profile_lsb);
  }

  if (j.contains("trigger")) {
    const json& t = j["trigger"];
    reject_unknown_keys(t,
                        {"threshold1", "threshold2", "pretrigger_n",
                         "posttrigger_m", "polarity"},
                        "trigger");
    get_if_present(t, "threshold1", cfg.trigger.threshold1);
    get_if_present(t, "threshold2", cfg.trigger.threshold2);
    get_if_present(t, "pretrigger_n", cfg.trigger.pretrigger_n);
    get_if_present(t, "posttrigger_m", cfg.trigger.posttrigger_m);
    if (t.contains("polarity")) {
      const auto p = t.at("polarity").get<std::string>();
      if (p == "negative")
        cfg.trigger.polarity = adc::Polarity::kNegativeGoing;
      else if (p == "positive")
        cfg.trigger.polarity = adc::Polarity::kPositiveGoing;
      else
        throw Error(Errc::kInvalidConfig, "polarity must be negative|positive");
    }
  }

  if (j.contains("compress")) {
    const json& c = j["compress"];
    reject_unknown_keys(c, {"mac_shift", "out_shift"}, "compress");
    get_if_present(c, "mac_shift", cfg.mac_shift);
    get_if_present(c, "out_shift", cfg.out_shift);
  }

  get_if_present(j, "mode", cfg.mode);
  if (j.contains("rng_seed"))
    cfg.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  if (j.contains("pixel_enable")) {
    const auto flags = j.at("pixel_enable").get<std::vector<int>>();
    cfg.pixel_enable.assign(flags.size(), false);
    for (std::size_t i = 0; i < flags.size(); ++i)
      cfg.pixel_enable[i] = flags[i] != 0;
  }

  // Synth seed mirrors the top-level seed so one knob controls the run.
  if (cfg.rng_seed) cfg.synth.rng_seed = *cfg.rng_seed;
  cfg.validate();
  return cfg;
}

void save_pipeline_config(const std::filesystem::path& path,
                          const PipelineConfig& cfg) {
  json j;
  j["synth"] = {{"cell_model_count", cfg.synth.cell_model_count},
                {"recording_duration_s", cfg.synth.recording_duration_s},
                {"noise_rms_v", cfg.synth.noise_rms_v},
                {"band_low_hz", cfg.synth.band_low_hz},
                {"band_high_hz", cfg.synth.band_high_hz},
                {"mean_spike_rate_hz", cfg.synth.mean_spike_rate_hz},
                {"sample_rate_hz", cfg.synth.sample_rate_hz},
                {"channel_count", cfg.synth.channel_count},
                {"refractory_s", cfg.synth.refractory_s}};
  j["frontend"] = {{"gain_db", cfg.frontend.gain_db},
                   {"band_low_hz", cfg.frontend.band_low_hz},
                   {"band_high_hz", cfg.frontend.band_high_hz},
                   {"input_noise_rms_v", cfg.frontend.input_noise_rms_v},
                   {"output_min_v", cfg.frontend.output_min_v},
                   {"output_max_v", cfg.frontend.output_max_v},
                   {"baseline_v", cfg.frontend.baseline_v},
                   {"gain_ref_hz", cfg.frontend.gain_ref_hz}};
  j["adc"] = {{"resolution_bits", cfg.ramp.resolution_bits},
              {"full_scale_min_v", cfg.ramp.full_scale_min_v},
              {"full_scale_max_v", cfg.ramp.full_scale_max_v},
              {"clock_hz", cfg.ramp.clock_hz},
              {"sample_rate_hz", cfg.ramp.sample_rate_hz}};
  if (!cfg.ramp.dnl_profile_lsb.empty())
    j["adc"]["dnl_profile_lsb"] = cfg.ramp.dnl_profile_lsb;
  j["trigger"] = {{"threshold1", cfg.trigger.threshold1},
                  {"threshold2", cfg.trigger.threshold2},
                  {"pretrigger_n", cfg.trigger.pretrigger_n},
                  {"posttrigger_m", cfg.trigger.posttrigger_m},
                  {"polarity",
                   cfg.trigger.polarity == adc::Polarity::kNegativeGoing
                       ? "negative"
                       : "positive"}};
  j["compress"] = {{"mac_shift", cfg.mac_shift}, {"out_shift", cfg.out_shift}};
  j["mode"] = cfg.mode;
  if (cfg.rng_seed) j["rng_seed"] = *cfg.rng_seed;
  if (!cfg.pixel_enable.empty()) {
    std::vector<int> flags(cfg.pixel_enable.size());
    for (std::size_t i = 0; i < flags.size(); ++i)
      flags[i] = cfg.pixel_enable[i] ? 1 : 0;
    j["pixel_enable"] = flags;
  }

  std::ofstream out(path);
  if (!out) throw Error(Errc::kIoError, "cannot open " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace neuroramp::config
