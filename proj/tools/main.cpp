// neuroramp command-line tool: synthetic data generation, calibration,
// event-driven acquisition runs, linearity sweeps, metric evaluation and
// configuration-frame packing.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "neuroramp/config.hpp"
#include "neuroramp/eval.hpp"
#include "neuroramp/io.hpp"
#include "neuroramp/link.hpp"
#include "neuroramp/pipeline.hpp"
#include "neuroramp/train.hpp"

using namespace neuroramp;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
  std::string config_path;
  bool ci = false;
};

config::PipelineConfig load_config(const CommonOptions& common) {
  config::PipelineConfig cfg;
  if (!common.config_path.empty())
    cfg = config::load_pipeline_config(common.config_path);
  if (common.ci && !cfg.rng_seed)
    throw Error(Errc::kInvalidConfig,
                "--ci requires an explicit rng_seed in the config");
  return cfg;
}

void add_common(CLI::App* app, CommonOptions& common) {
  app->add_option("--config", common.config_path,
                  "JSON pipeline config (unknown keys rejected)");
  app->add_flag("--ci", common.ci, "Fail unless the config pins rng_seed");
}

pipeline::RunSettings settings_from(const config::PipelineConfig& cfg) {
  pipeline::RunSettings settings;
  settings.frontend = cfg.frontend;
  settings.ramp = cfg.ramp;
  settings.trigger = cfg.trigger;
  settings.pixel_enable = cfg.pixel_enable;
  settings.noise_seed = cfg.seed_or_default();
  return settings;
}

train::SpikeMatrix windows_to_rows(const std::vector<pipeline::SpikeWindow>& windows) {
  train::SpikeMatrix rows;
  rows.reserve(windows.size());
  for (const auto& w : windows) {
    std::vector<double> row(compress::kSpikeWindowSamples, 0.0);
    for (std::size_t i = 0; i < w.codes.size(); ++i)
      row[i] = w.codes[i] - compress::kBaselineCode;
    rows.push_back(std::move(row));
  }
  return rows;
}

json registers_to_json(const link::RegisterBank& bank) {
  json j;
  std::vector<int> enable(link::RegisterBank::kChannelCount);
  for (int ch = 0; ch < link::RegisterBank::kChannelCount; ++ch)
    enable[ch] = bank.pixel_enabled(ch) ? 1 : 0;
  j["pixel_enable"] = enable;
  j["threshold1"] = bank.threshold1();
  j["threshold2"] = bank.threshold2();
  j["sampling_period_divider"] = bank.sampling_period_divider();
  j["pretrigger_n"] = bank.pretrigger_n();
  j["mode"] = bank.mode() == link::RecordMode::kCompressed ? "compressed" : "raw";
  json coeff = json::array();
  const auto mem = bank.pca_memory(6, 5, 1.0);
  for (const auto& row : mem.coefficients)
    coeff.push_back(std::vector<int>(row.begin(), row.end()));
  j["pca_coefficients"] = coeff;
  return j;
}

link::RegisterBank registers_from_json(const json& j) {
  link::RegisterBank bank;
  if (j.contains("pixel_enable")) {
    const auto enable = j.at("pixel_enable").get<std::vector<int>>();
    for (std::size_t ch = 0; ch < enable.size(); ++ch)
      bank.set_pixel_enabled(static_cast<int>(ch), enable[ch] != 0);
  }
  if (j.contains("threshold1"))
    bank.write(link::RegisterBank::kThreshold1,
               static_cast<std::uint8_t>(j.at("threshold1").get<int>()));
  if (j.contains("threshold2"))
    bank.write(link::RegisterBank::kThreshold2,
               static_cast<std::uint8_t>(j.at("threshold2").get<int>()));
  if (j.contains("sampling_period_divider"))
    bank.set_sampling_period_divider(
        static_cast<std::uint16_t>(j.at("sampling_period_divider").get<int>()));
  if (j.contains("pretrigger_n"))
    bank.write(link::RegisterBank::kPretriggerN,
               static_cast<std::uint8_t>(j.at("pretrigger_n").get<int>()));
  if (j.contains("mode"))
    bank.set_mode(j.at("mode").get<std::string>() == "raw"
                      ? link::RecordMode::kRaw
                      : link::RecordMode::kCompressed);
  if (j.contains("pca_coefficients")) {
    compress::QuantizedPcaMemory mem;
    const auto coeff =
        j.at("pca_coefficients").get<std::vector<std::vector<int>>>();
    for (std::size_t c = 0; c < coeff.size() && c < 4; ++c)
      for (std::size_t i = 0; i < coeff[c].size() && i < 22; ++i)
        mem.coefficients[c][i] = static_cast<std::int16_t>(coeff[c][i]);
    bank.load_pca_coefficients(mem);
  }
  return bank;
}

// Shared sorting-evaluation path for raw and compressed streams.
struct SortingInputs {
  synth::GroundTruth gt;
  std::vector<eval::FoundSpike> detections;
  std::vector<std::vector<double>> features;
  std::int64_t split_sample = 0;
  std::int64_t match_window = 20;
};

eval::MatchReport run_sorting_eval(const SortingInputs& in) {
  std::vector<eval::LabeledFeature> training;
  for (std::size_t i = 0; i < in.detections.size(); ++i) {
    if (in.detections[i].time_sample >= in.split_sample) continue;
    // Label by the nearest truth spike on the same channel.
    int best = -1;
    std::int64_t best_d = in.match_window + 1;
    for (const auto& s : in.gt.spikes) {
      if (s.channel != in.detections[i].channel) continue;
      const auto d = std::abs(s.time_sample - in.detections[i].time_sample);
      if (d < best_d) {
        best_d = d;
        best = s.cell_id;
      }
    }
    if (best >= 0)
      training.push_back({best, in.detections[i].channel, in.features[i]});
  }
  const auto centroids = eval::train_centroids(training);

  synth::GroundTruth gt_test;
  for (const auto& s : in.gt.spikes)
    if (s.time_sample >= in.split_sample) gt_test.spikes.push_back(s);
  std::vector<eval::FoundSpike> test;
  for (std::size_t i = 0; i < in.detections.size(); ++i) {
    if (in.detections[i].time_sample < in.split_sample) continue;
    auto spike = in.detections[i];
    spike.label = eval::classify(in.features[i], spike.channel, centroids);
    test.push_back(spike);
  }
  return eval::score_sorting(gt_test, test, in.match_window);
}

int run_app(int argc, char** argv) {
  CLI::App app{"Event-driven neural-recording signal chain simulator"};
  app.require_subcommand(1);

  // ---- gen ---------------------------------------------------------------
  auto* gen = app.add_subcommand(
      "gen", "Generate a synthetic recording with ground truth");
  CommonOptions gen_common;
  add_common(gen, gen_common);
  std::string gen_out = "recording";
  std::optional<int> gen_cells, gen_channels;
  std::optional<double> gen_duration, gen_noise, gen_rate, gen_sample_rate,
      gen_band_low, gen_band_high;
  std::optional<std::uint64_t> gen_seed;
  gen->add_option("--out", gen_out, "Output base path (three files)");
  gen->add_option("--cells", gen_cells, "Cell model count");
  gen->add_option("--channels", gen_channels, "Electrode channel count");
  gen->add_option("--duration", gen_duration, "Recording duration [s]");
  gen->add_option("--noise", gen_noise, "Noise RMS [V]");
  gen->add_option("--rate", gen_rate, "Mean spike rate per neuron [Hz]");
  gen->add_option("--sample-rate", gen_sample_rate, "Sample rate [Hz]");
  gen->add_option("--band-low", gen_band_low, "Band lower edge [Hz]");
  gen->add_option("--band-high", gen_band_high, "Band upper edge [Hz]");
  gen->add_option("--seed", gen_seed, "RNG seed");

  // ---- train ---------------------------------------------------------------
  auto* train_cmd = app.add_subcommand(
      "train", "Fit the compression basis (and optionally the trigger)");
  CommonOptions train_common;
  add_common(train_cmd, train_common);
  std::string train_recording, train_out_dir = ".";
  bool do_calibrate = false;
  int train_jobs = 1;
  train_cmd->add_option("--recording", train_recording,
                        "Recording base path (from gen)")
      ->required();
  train_cmd->add_option("--out-dir", train_out_dir,
                        "Directory for basis.json and trigger.json");
  train_cmd->add_flag("--calibrate", do_calibrate,
                      "Grid-search thresholds and window sizes");
  train_cmd->add_option("--jobs", train_jobs,
                        "Parallel workers for the grid search");

  // ---- run -----------------------------------------------------------------
  auto* run_cmd = app.add_subcommand(
      "run", "Digitize a recording into a raw or compressed stream");
  CommonOptions run_common;
  add_common(run_cmd, run_common);
  std::string run_recording, run_out, run_mode = "";
  std::string run_basis, run_trigger;
  run_cmd->add_option("--recording", run_recording, "Recording base path")
      ->required();
  run_cmd->add_option("--out", run_out, "Output stream file")->required();
  run_cmd->add_option("--mode", run_mode, "raw | compressed");
  run_cmd->add_option("--basis", run_basis,
                      "basis.json (required for compressed mode)");
  run_cmd->add_option("--trigger", run_trigger,
                      "trigger.json overriding the config trigger");

  // ---- linearity -----------------------------------------------------------
  auto* lin = app.add_subcommand(
      "linearity", "Code-density sweep with DNL/INL extraction");
  CommonOptions lin_common;
  add_common(lin, lin_common);
  std::string lin_out_dir = ".";
  int lin_reps = 50;
  double lin_sweep_s = 1.0;
  std::optional<int> lin_inject_code;
  double lin_inject_lsb = 0.5;
  lin->add_option("--out-dir", lin_out_dir, "Directory for CSV outputs");
  lin->add_option("--reps", lin_reps, "Full-scale sweep repetitions");
  lin->add_option("--sweep-duration", lin_sweep_s, "Sweep duration [s]");
  lin->add_option("--inject-code", lin_inject_code,
                  "Widen one code's step for error-recovery checks");
  lin->add_option("--inject-lsb", lin_inject_lsb,
                  "Injected step-width error [LSB]");

  // ---- eval ----------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand(
      "eval", "Score a run against ground truth; bandwidth and budget reports");
  CommonOptions eval_common;
  add_common(eval_cmd, eval_common);
  std::string eval_recording, eval_stream, eval_mode = "compressed";
  std::string eval_basis, eval_trigger, eval_out_dir = ".";
  std::string eval_histogram;
  double eval_train_frac = 0.5, eval_window_ms = 1.0;
  std::int64_t eval_overhead_detected = 40, eval_overhead_compressed = 0;
  std::string eval_density = "1/40";
  eval_cmd->add_option("--recording", eval_recording, "Recording base path");
  eval_cmd->add_option("--stream", eval_stream, "Stream file from run");
  eval_cmd->add_option("--mode", eval_mode, "raw | compressed");
  eval_cmd->add_option("--basis", eval_basis, "basis.json (compressed mode)");
  eval_cmd->add_option("--trigger", eval_trigger, "trigger.json (raw mode)");
  eval_cmd->add_option("--out-dir", eval_out_dir, "Directory for reports");
  eval_cmd->add_option("--train-frac", eval_train_frac,
                       "Leading fraction used to fit classifier centroids");
  eval_cmd->add_option("--window-ms", eval_window_ms,
                       "Spike matching window [ms]");
  eval_cmd->add_option("--overhead-detected", eval_overhead_detected,
                       "Per-event overhead bits, detected packets");
  eval_cmd->add_option("--overhead-compressed", eval_overhead_compressed,
                       "Per-event overhead bits, compressed packets");
  eval_cmd->add_option("--spike-density", eval_density,
                       "Budget spike density as num/den");
  eval_cmd->add_option("--histogram", eval_histogram,
                       "Code histogram CSV; emits dnl.csv and inl.csv");

  // ---- pack / unpack --------------------------------------------------------
  auto* pack = app.add_subcommand(
      "pack", "Frame a register-bank JSON into a Manchester chip stream");
  std::string pack_in, pack_out;
  pack->add_option("--registers", pack_in, "Register JSON file")->required();
  pack->add_option("--out", pack_out, "Framed binary output")->required();

  auto* unpack = app.add_subcommand(
      "unpack", "Parse a framed chip stream back into register JSON");
  std::string unpack_in, unpack_out;
  unpack->add_option("--in", unpack_in, "Framed binary input")->required();
  unpack->add_option("--out", unpack_out, "Register JSON output")->required();

  CLI11_PARSE(app, argc, argv);

  // ---- command bodies -------------------------------------------------------
  if (gen->parsed()) {
    auto cfg = load_config(gen_common);
    if (gen_seed) cfg.rng_seed = *gen_seed;
    if (gen_common.ci && !cfg.rng_seed)
      throw Error(Errc::kInvalidConfig, "--ci requires --seed or config seed");
    cfg.synth.rng_seed = cfg.seed_or_default();
    if (gen_cells) cfg.synth.cell_model_count = *gen_cells;
    if (gen_channels) cfg.synth.channel_count = *gen_channels;
    if (gen_duration) cfg.synth.recording_duration_s = *gen_duration;
    if (gen_noise) cfg.synth.noise_rms_v = *gen_noise;
    if (gen_rate) cfg.synth.mean_spike_rate_hz = *gen_rate;
    if (gen_sample_rate) cfg.synth.sample_rate_hz = *gen_sample_rate;
    if (gen_band_low) cfg.synth.band_low_hz = *gen_band_low;
    if (gen_band_high) cfg.synth.band_high_hz = *gen_band_high;
    cfg.synth.validate();

    const auto bank = synth::generate_templates(cfg.synth);
    const auto [rec, gt] = synth::generate_recording(cfg.synth, bank);
    io::write_recording(gen_out, rec, gt);
    std::printf("gen: %zu channels x %zu samples, %zu truth spikes -> %s.*\n",
                rec.channel_count(), rec.sample_count(), gt.spikes.size(),
                gen_out.c_str());
    return 0;
  }

  if (train_cmd->parsed()) {
    auto cfg = load_config(train_common);
    const auto rec = io::read_recording(train_recording);
    const auto gt = io::read_ground_truth(train_recording);
    auto settings = settings_from(cfg);

    if (do_calibrate) {
      auto grid = train::default_grid();
      const auto result =
          train::calibrate(rec, gt, grid, settings.frontend, settings.ramp,
                           1e-3, train_jobs);
      settings.trigger = result.trigger;
      std::printf("train: calibrated trigger (%d, %d) N=%d M=%d accuracy=%.4f\n",
                  result.trigger.threshold1, result.trigger.threshold2,
                  result.trigger.pretrigger_n, result.trigger.posttrigger_m,
                  result.accuracy);
    }

    const auto run = pipeline::run_detection(rec, settings);
    if (run.windows.size() < 2)
      throw Error(Errc::kInvalidConfig,
                  "not enough detected spikes to fit a basis");
    const auto rows = windows_to_rows(run.windows);
    io::BasisFile artifact;
    artifact.basis = train::compute_pca_basis(rows, compress::kComponentCount);
    const auto [mac, out] = train::select_shifts(artifact.basis, rows);
    artifact.memory = train::quantize_basis(artifact.basis, mac, out);

    fs::create_directories(train_out_dir);
    io::write_basis_json(fs::path(train_out_dir) / "basis.json", artifact);
    io::write_trigger_json(fs::path(train_out_dir) / "trigger.json",
                           settings.trigger);
    std::printf("train: %zu windows, shifts=(%d,%d), scale=%.3f -> %s\n",
                run.windows.size(), mac, out, artifact.memory.scale,
                train_out_dir.c_str());
    return 0;
  }

  if (run_cmd->parsed()) {
    auto cfg = load_config(run_common);
    if (!run_mode.empty()) cfg.mode = run_mode;
    const auto rec = io::read_recording(run_recording);
    auto settings = settings_from(cfg);
    if (!run_trigger.empty())
      settings.trigger = io::read_trigger_json(run_trigger);

    const auto run = pipeline::run_detection(rec, settings);
    if (cfg.mode == "raw") {
      io::write_raw_stream(run_out, run.events, run.period_count);
      std::printf("run: raw mode, %zu events over %lld periods -> %s\n",
                  run.events.size(),
                  static_cast<long long>(run.period_count), run_out.c_str());
    } else {
      if (run_basis.empty())
        throw Error(Errc::kInvalidConfig, "compressed mode needs --basis");
      const auto artifact = io::read_basis_json(run_basis);
      const auto result = pipeline::compress_run(
          run, artifact.memory, static_cast<int>(rec.channel_count()),
          settings.trigger.window_length());
      io::write_compressed_stream(run_out, result.spikes);
      std::printf(
          "run: compressed mode, %zu spikes (%llu samples, %llu cycles) -> %s\n",
          result.spikes.size(),
          static_cast<unsigned long long>(run.digitized_samples),
          static_cast<unsigned long long>(result.cycles_consumed),
          run_out.c_str());
    }
    return 0;
  }

  if (lin->parsed()) {
    auto cfg = load_config(lin_common);
    auto ramp = cfg.ramp;
    if (lin_inject_code) {
      ramp.dnl_profile_lsb.assign(ramp.code_count(), 0.0);
      ramp.dnl_profile_lsb[*lin_inject_code] = lin_inject_lsb;
    }
    const auto hits = adc::code_density_capture(ramp, lin_sweep_s, lin_reps);
    const auto dnl = eval::dnl(hits);
    const auto inl = eval::inl(dnl.values);
    fs::create_directories(lin_out_dir);
    io::write_histogram_csv(fs::path(lin_out_dir) / "hist.csv", hits);
    io::write_linearity_csv(fs::path(lin_out_dir) / "dnl.csv", dnl.values,
                            dnl.first_code, "dnl");
    io::write_linearity_csv(fs::path(lin_out_dir) / "inl.csv", inl,
                            dnl.first_code, "inl");
    double max_dnl = 0.0, max_inl = 0.0;
    for (const double v : dnl.values) max_dnl = std::max(max_dnl, std::abs(v));
    for (const double v : inl) max_inl = std::max(max_inl, std::abs(v));
    std::printf("linearity: %d reps, max|DNL|=%.4f max|INL|=%.4f -> %s\n",
                lin_reps, max_dnl, max_inl, lin_out_dir.c_str());
    return 0;
  }

  if (eval_cmd->parsed()) {
    auto cfg = load_config(eval_common);
    fs::create_directories(eval_out_dir);

    if (!eval_histogram.empty()) {
      const auto hits = io::read_histogram_csv(eval_histogram);
      const auto dnl = eval::dnl(hits);
      const auto inl = eval::inl(dnl.values);
      io::write_linearity_csv(fs::path(eval_out_dir) / "dnl.csv", dnl.values,
                              dnl.first_code, "dnl");
      io::write_linearity_csv(fs::path(eval_out_dir) / "inl.csv", inl,
                              dnl.first_code, "inl");
      std::printf("eval: linearity metrics -> %s\n", eval_out_dir.c_str());
      if (eval_stream.empty()) return 0;
    }

    if (eval_recording.empty() || eval_stream.empty())
      throw Error(Errc::kInvalidConfig, "eval needs --recording and --stream");
    const auto rec = io::read_recording(eval_recording);
    const auto gt = io::read_ground_truth(eval_recording);
    const auto match_window = static_cast<std::int64_t>(
        std::llround(eval_window_ms * 1e-3 * rec.sample_rate_hz));
    // Streams carry sampling-period timestamps; ground truth is in trace
    // samples.
    const auto decimation = std::max<std::int64_t>(
        1, std::llround(rec.sample_rate_hz / cfg.ramp.sample_rate_hz));
    SortingInputs inputs;
    inputs.gt = gt;
    inputs.match_window = std::max<std::int64_t>(1, match_window);
    inputs.split_sample = static_cast<std::int64_t>(
        eval_train_frac * static_cast<double>(rec.sample_count()));

    std::size_t event_count = 0;
    if (eval_mode == "raw") {
      adc::TriggerConfig trigger = cfg.trigger;
      if (!eval_trigger.empty()) trigger = io::read_trigger_json(eval_trigger);
      const auto stream = io::read_raw_stream(eval_stream);
      event_count = stream.events.size();
      const auto windows = pipeline::extract_windows(
          stream.events, static_cast<int>(rec.channel_count()),
          trigger.window_length());
      for (const auto& w : windows) {
        inputs.detections.push_back({w.channel, w.start_period * decimation,
                                     -1});
        std::vector<double> feature(w.codes.begin(), w.codes.end());
        for (double& v : feature) v -= compress::kBaselineCode;
        inputs.features.push_back(std::move(feature));
      }
    } else {
      const auto spikes = io::read_compressed_stream(eval_stream);
      event_count = spikes.size();
      for (const auto& s : spikes) {
        inputs.detections.push_back({s.channel, s.period_index * decimation,
                                     -1});
        inputs.features.push_back(std::vector<double>(s.components.begin(),
                                                      s.components.end()));
      }
    }

    const auto report = run_sorting_eval(inputs);
    io::write_confusion_csv(fs::path(eval_out_dir) / "confusion.csv", report);

    // Bandwidth accounting from the measured per-channel spike rate.
    const auto sample_rate =
        static_cast<std::int64_t>(std::llround(rec.sample_rate_hz));
    const auto spike_rate = Rational::of(
        static_cast<std::int64_t>(inputs.detections.size()) * sample_rate,
        static_cast<std::int64_t>(rec.sample_count()) *
            static_cast<std::int64_t>(rec.channel_count()));
    const auto ratios = eval::compression_ratio(
        Rational(sample_rate), 8, spike_rate, eval_overhead_detected,
        eval_overhead_compressed);
    io::write_ratios_json(fs::path(eval_out_dir) / "ratios.json", ratios);

    const auto slash = eval_density.find('/');
    const auto density =
        slash == std::string::npos
            ? Rational(std::stoll(eval_density))
            : Rational::of(std::stoll(eval_density.substr(0, slash)),
                           std::stoll(eval_density.substr(slash + 1)));
    const auto budget = eval::throughput_budget(
        static_cast<std::int64_t>(rec.channel_count()), sample_rate,
        static_cast<std::int64_t>(std::llround(cfg.ramp.clock_hz)), density);
    io::write_budget_json(fs::path(eval_out_dir) / "budget.json", budget);

    json metrics;
    metrics["mode"] = eval_mode;
    metrics["accuracy"] = report.accuracy;
    metrics["tp"] = report.tp;
    metrics["fp"] = report.fp;
    metrics["fn"] = report.fn;
    metrics["detections"] = inputs.detections.size();
    metrics["stream_records"] = event_count;
    std::ofstream metrics_out(fs::path(eval_out_dir) / "metrics.json");
    metrics_out << metrics.dump(2) << '\n';

    std::printf("eval: %s accuracy=%.4f (tp=%lld fp=%lld fn=%lld) -> %s\n",
                eval_mode.c_str(), report.accuracy,
                static_cast<long long>(report.tp),
                static_cast<long long>(report.fp),
                static_cast<long long>(report.fn), eval_out_dir.c_str());
    return 0;
  }

  if (pack->parsed()) {
    std::ifstream in(pack_in);
    if (!in) throw Error(Errc::kIoError, "cannot open " + pack_in);
    json j;
    in >> j;
    const auto bank = registers_from_json(j);
    const auto image = bank.serialize();
    const auto chips = link::frame_config(image);
    const auto packed = link::pack_chips(chips);
    std::ofstream out(pack_out, std::ios::binary);
    out.write(reinterpret_cast<const char*>(packed.data()),
              static_cast<std::streamsize>(packed.size()));
    std::printf("pack: %zu register bytes -> %zu chips, load time %.3f ms "
                "at 2 Mbit/s -> %s\n",
                image.size(), chips.size(),
                link::config_load_time_s(image.size()) * 1e3,
                pack_out.c_str());
    return 0;
  }

  if (unpack->parsed()) {
    std::ifstream in(unpack_in, std::ios::binary);
    if (!in) throw Error(Errc::kIoError, "cannot open " + unpack_in);
    const std::vector<std::uint8_t> packed(
        (std::istreambuf_iterator<char>(in)),
        std::istreambuf_iterator<char>());
    const auto chips = link::unpack_chips(packed);
    const auto payload = link::parse_frame(chips);
    const auto bank = link::RegisterBank::deserialize(payload);
    std::ofstream out(unpack_out);
    out << registers_to_json(bank).dump(2) << '\n';
    std::printf("unpack: %zu chips -> %s\n", chips.size(), unpack_out.c_str());
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_app(argc, argv);
  } catch (const Error& e) {
    json err;
    err["error"] = to_string(e.code());
    err["message"] = e.what();
    std::cerr << err.dump() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    json err;
    err["error"] = "Unexpected";
    err["message"] = e.what();
    std::cerr << err.dump() << std::endl;
    return 3;
  }
}
