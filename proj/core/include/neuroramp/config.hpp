#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "neuroramp/adc.hpp"
#include "neuroramp/frontend.hpp"
#include "neuroramp/synth.hpp"

namespace neuroramp::config {

// Whole-run configuration, one JSON file with nested per-module sections.
// Unknown keys anywhere in the document are rejected before any run starts.
struct PipelineConfig {
  synth::SynthConfig synth;
  frontend::FrontEndConfig frontend;
  adc::RampConfig ramp;
  adc::TriggerConfig trigger;
  int mac_shift = 6;
  int out_shift = 5;
  std::string mode = "compressed";  // raw | compressed
  std::optional<std::uint64_t> rng_seed;
  std::vector<bool> pixel_enable;  // empty = all channels on

  void validate() const;
  std::uint64_t seed_or_default() const { return rng_seed.value_or(1); }
};

PipelineConfig load_pipeline_config(const std::filesystem::path& path);
void save_pipeline_config(const std::filesystem::path& path,
                          const PipelineConfig& cfg);

}  // namespace neuroramp::config
