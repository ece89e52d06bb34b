#include "neuroramp/io.hpp"

#include <fstream>

#include <json.hpp>

namespace neuroramp::io {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out)
    throw Error(Errc::kIoError, "cannot open " + path.string() + " for write");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path.string());
  return in;
}

json load_json(const std::filesystem::path& path) {
  auto in = open_in(path, false);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::kIoError, path.string() + ": " + e.what());
  }
  return j;
}

void store_json(const std::filesystem::path& path, const json& j) {
  auto out = open_out(path, false);
  out << j.dump(2) << '\n';
}

std::vector<std::uint8_t> read_all_bytes(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

void write_recording(const std::filesystem::path& base,
                     const synth::Recording& recording,
                     const synth::GroundTruth& gt) {
  const auto raw_path = base.string() + ".f32raw";
  auto raw = open_out(raw_path, true);
  for (const auto& trace : recording.traces) {
    std::vector<float> row(trace.begin(), trace.end());
    raw.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }

  json header;
  header["format"] = "f32raw";
  header["channel_count"] = recording.channel_count();
  header["sample_count"] = recording.sample_count();
  header["sample_rate_hz"] = recording.sample_rate_hz;
  store_json(base.string() + ".header.json", header);

  json spikes = json::array();
  for (const auto& s : gt.spikes)
    spikes.push_back({{"cell_id", s.cell_id},
                      {"time_sample", s.time_sample},
                      {"channel", s.channel}});
  store_json(base.string() + ".gt.json", spikes);
}

synth::Recording read_recording(const std::filesystem::path& base) {
  const json header = load_json(base.string() + ".header.json");
  synth::Recording rec;
  const auto channels = header.at("channel_count").get<std::size_t>();
  const auto samples = header.at("sample_count").get<std::size_t>();
  rec.sample_rate_hz = header.at("sample_rate_hz").get<double>();

  auto raw = open_in(base.string() + ".f32raw", true);
  rec.traces.assign(channels, std::vector<double>(samples, 0.0));
  std::vector<float> row(samples);
  for (auto& trace : rec.traces) {
    raw.read(reinterpret_cast<char*>(row.data()),
             static_cast<std::streamsize>(samples * sizeof(float)));
    if (static_cast<std::size_t>(raw.gcount()) != samples * sizeof(float))
      throw Error(Errc::kIoError, "trace file shorter than header claims");
    trace.assign(row.begin(), row.end());
  }
  return rec;
}

synth::GroundTruth read_ground_truth(const std::filesystem::path& base) {
  const json spikes = load_json(base.string() + ".gt.json");
  synth::GroundTruth gt;
  for (const auto& s : spikes)
    gt.spikes.push_back({s.at("cell_id").get<int>(),
                         s.at("time_sample").get<std::int64_t>(),
                         s.at("channel").get<int>()});
  return gt;
}

std::uint32_t encode_raw_event(const adc::AdcEvent& event) {
  if (event.channel < 0 || event.channel > 63)
    throw Error(Errc::kInvalidConfig, "channel exceeds the 6-bit address");
  if (event.code < 0 || event.code > 255)
    throw Error(Errc::kInvalidConfig, "code exceeds 8 bits");
  if (event.ramp_cycle < 0 || event.ramp_cycle > 1023)
    throw Error(Errc::kInvalidConfig, "ramp_cycle exceeds 10 bits");
  return static_cast<std::uint32_t>(event.channel) |
         (static_cast<std::uint32_t>(event.code) << 6) |
         (static_cast<std::uint32_t>(event.ramp_cycle) << 14);
}

adc::AdcEvent decode_raw_event(std::uint32_t word, std::int64_t period_index) {
  adc::AdcEvent ev;
  ev.channel = static_cast<int>(word & 0x3F);
  ev.code = static_cast<int>((word >> 6) & 0xFF);
  ev.ramp_cycle = static_cast<int>((word >> 14) & 0x3FF);
  ev.period_index = period_index;
  return ev;
}

void write_raw_stream(const std::filesystem::path& path,
                      std::span<const adc::AdcEvent> events,
                      std::int64_t period_count) {
  auto out = open_out(path, true);
  auto put = [&out](std::uint32_t word) {
    const std::uint8_t bytes[4] = {
        static_cast<std::uint8_t>(word), static_cast<std::uint8_t>(word >> 8),
        static_cast<std::uint8_t>(word >> 16),
        static_cast<std::uint8_t>(word >> 24)};
    out.write(reinterpret_cast<const char*>(bytes), 4);
  };
  std::size_t next = 0;
  for (std::int64_t p = 0; p < period_count; ++p) {
    put(kRawSyncWord);
    while (next < events.size() && events[next].period_index == p)
      put(encode_raw_event(events[next++]));
  }
  if (next != events.size())
    throw Error(Errc::kInvalidConfig,
                "events outside period range or not time-ordered");
}

RawStream read_raw_stream(const std::filesystem::path& path) {
  const auto bytes = read_all_bytes(path);
  if (bytes.size() % 4 != 0)
    throw Error(Errc::kTruncatedFrame, "raw stream not word aligned",
                bytes.size());
  RawStream stream;
  std::int64_t period = -1;
  for (std::size_t i = 0; i < bytes.size(); i += 4) {
    const std::uint32_t word =
        static_cast<std::uint32_t>(bytes[i]) |
        (static_cast<std::uint32_t>(bytes[i + 1]) << 8) |
        (static_cast<std::uint32_t>(bytes[i + 2]) << 16) |
        (static_cast<std::uint32_t>(bytes[i + 3]) << 24);
    if (word == kRawSyncWord) {
      ++period;
      continue;
    }
    if (period < 0)
      throw Error(Errc::kBadPreamble, "event before the first period sync", i);
    stream.events.push_back(decode_raw_event(word, period));
  }
  stream.period_count = period + 1;
  return stream;
}

std::uint64_t encode_compressed_record(
    const compress::CompressedSpike& spike) {
  if (spike.channel < 0 || spike.channel > 63)
    throw Error(Errc::kInvalidConfig, "channel exceeds the 6-bit address");
  const std::uint64_t period =
      static_cast<std::uint64_t>(spike.period_index) &
      ((std::uint64_t{1} << kPeriodFieldBits) - 1);
  return static_cast<std::uint64_t>(spike.channel) | (period << 6) |
         (static_cast<std::uint64_t>(spike.pack_payload()) << 24);
}

compress::CompressedSpike decode_compressed_record(std::uint64_t word) {
  compress::CompressedSpike spike;
  spike.channel = static_cast<int>(word & 0x3F);
  spike.period_index =
      static_cast<std::int64_t>((word >> 6) & ((1u << kPeriodFieldBits) - 1));
  spike.components = compress::CompressedSpike::unpack_payload(
      static_cast<std::uint32_t>((word >> 24) & 0xFFFFFF));
  return spike;
}

void write_compressed_stream(
    const std::filesystem::path& path,
    std::span<const compress::CompressedSpike> spikes) {
  auto out = open_out(path, true);
  for (const auto& spike : spikes) {
    const std::uint64_t word = encode_compressed_record(spike);
    const std::uint8_t record[8] = {
        static_cast<std::uint8_t>(kCompressedSync & 0xFF),
        static_cast<std::uint8_t>(kCompressedSync >> 8),
        static_cast<std::uint8_t>(word),
        static_cast<std::uint8_t>(word >> 8),
        static_cast<std::uint8_t>(word >> 16),
        static_cast<std::uint8_t>(word >> 24),
        static_cast<std::uint8_t>(word >> 32),
        static_cast<std::uint8_t>(word >> 40)};
    out.write(reinterpret_cast<const char*>(record), 8);
  }
}

std::vector<compress::CompressedSpike> read_compressed_stream(
    const std::filesystem::path& path) {
  const auto bytes = read_all_bytes(path);
  if (bytes.size() % 8 != 0)
    throw Error(Errc::kTruncatedFrame, "compressed stream not record aligned",
                bytes.size());
  std::vector<compress::CompressedSpike> spikes;
  // 18-bit period unwinding. Records are written in completion order, so
  // consecutive period fields are monotone up to one window of jitter; a
  // small backward window (64 periods) absorbs that, and any larger apparent
  // step back is a wrap.
  constexpr std::int64_t kBackWindow = 64;
  std::int64_t last = 0;
  const std::int64_t modulus = std::int64_t{1} << kPeriodFieldBits;
  for (std::size_t i = 0; i < bytes.size(); i += 8) {
    const std::uint16_t sync = static_cast<std::uint16_t>(
        bytes[i] | (static_cast<std::uint16_t>(bytes[i + 1]) << 8));
    if (sync != kCompressedSync)
      throw Error(Errc::kBadPreamble, "missing record sync", i);
    std::uint64_t word = 0;
    for (int b = 0; b < 6; ++b)
      word |= static_cast<std::uint64_t>(bytes[i + 2 + b]) << (8 * b);
    auto spike = decode_compressed_record(word);
    if (!spikes.empty()) {
      const std::int64_t raw_delta =
          (spike.period_index - (last % modulus) + modulus) % modulus;
      const std::int64_t delta = raw_delta >= modulus - kBackWindow
                                     ? raw_delta - modulus
                                     : raw_delta;
      spike.period_index = last + delta;
    }
    last = spike.period_index;
    spikes.push_back(spike);
  }
  return spikes;
}

void write_basis_json(const std::filesystem::path& path,
                      const BasisFile& data) {
  json j;
  j["w"] = data.basis.w;
  j["eigenvalues"] = data.basis.eigenvalues;
  j["mean"] = data.basis.mean;
  j["scale"] = data.memory.scale;
  j["mac_shift"] = data.memory.mac_shift;
  j["out_shift"] = data.memory.out_shift;
  json coeff = json::array();
  for (const auto& row : data.memory.coefficients)
    coeff.push_back(std::vector<int>(row.begin(), row.end()));
  j["coefficients"] = coeff;
  store_json(path, j);
}

BasisFile read_basis_json(const std::filesystem::path& path) {
  const json j = load_json(path);
  BasisFile data;
  data.basis.w = j.at("w").get<std::vector<std::vector<double>>>();
  data.basis.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
  data.basis.mean = j.at("mean").get<std::vector<double>>();
  data.memory.scale = j.at("scale").get<double>();
  data.memory.mac_shift = j.at("mac_shift").get<int>();
  data.memory.out_shift = j.at("out_shift").get<int>();
  const auto coeff = j.at("coefficients").get<std::vector<std::vector<int>>>();
  if (coeff.size() != compress::kComponentCount)
    throw Error(Errc::kLengthMismatch, "coefficient rows");
  for (std::size_t c = 0; c < coeff.size(); ++c) {
    if (coeff[c].size() != compress::kSpikeWindowSamples)
      throw Error(Errc::kLengthMismatch, "coefficient columns");
    for (std::size_t i = 0; i < coeff[c].size(); ++i)
      data.memory.coefficients[c][i] = static_cast<std::int16_t>(coeff[c][i]);
  }
  data.memory.validate();
  return data;
}

void write_trigger_json(const std::filesystem::path& path,
                        const adc::TriggerConfig& trigger) {
  json j;
  j["threshold1"] = trigger.threshold1;
  j["threshold2"] = trigger.threshold2;
  j["pretrigger_n"] = trigger.pretrigger_n;
  j["posttrigger_m"] = trigger.posttrigger_m;
  j["polarity"] = trigger.polarity == adc::Polarity::kNegativeGoing
                      ? "negative"
                      : "positive";
  store_json(path, j);
}

adc::TriggerConfig read_trigger_json(const std::filesystem::path& path) {
  const json j = load_json(path);
  adc::TriggerConfig trigger;
  trigger.threshold1 = j.at("threshold1").get<int>();
  trigger.threshold2 = j.at("threshold2").get<int>();
  trigger.pretrigger_n = j.at("pretrigger_n").get<int>();
  trigger.posttrigger_m = j.at("posttrigger_m").get<int>();
  const auto polarity = j.at("polarity").get<std::string>();
  if (polarity == "negative")
    trigger.polarity = adc::Polarity::kNegativeGoing;
  else if (polarity == "positive")
    trigger.polarity = adc::Polarity::kPositiveGoing;
  else
    throw Error(Errc::kInvalidConfig, "polarity must be negative|positive");
  trigger.validate();
  return trigger;
}

void write_histogram_csv(const std::filesystem::path& path,
                         std::span<const std::uint64_t> hits) {
  auto out = open_out(path, false);
  out << "code,hits\n";
  for (std::size_t i = 0; i < hits.size(); ++i)
    out << i << ',' << hits[i] << '\n';
}

std::vector<std::uint64_t> read_histogram_csv(
    const std::filesystem::path& path) {
  auto in = open_in(path, false);
  std::string line;
  if (!std::getline(in, line) || line.rfind("code,hits", 0) != 0)
    throw Error(Errc::kIoError, "expected code,hits header");
  std::vector<std::uint64_t> hits;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw Error(Errc::kIoError, "malformed histogram row");
    hits.push_back(std::stoull(line.substr(comma + 1)));
  }
  return hits;
}

void write_linearity_csv(const std::filesystem::path& path,
                         std::span<const double> values, int first_code,
                         const std::string& column) {
  auto out = open_out(path, false);
  out << "code," << column << '\n';
  out.precision(12);
  for (std::size_t i = 0; i < values.size(); ++i)
    out << (first_code + static_cast<int>(i)) << ',' << values[i] << '\n';
}

void write_confusion_csv(const std::filesystem::path& path,
                         const eval::MatchReport& report) {
  auto out = open_out(path, false);
  out << "gt_cell";
  for (const int label : report.col_labels)
    out << ",label_" << (label < 0 ? std::string("none")
                                   : std::to_string(label));
  out << ",unmatched\n";
  for (std::size_t r = 0; r < report.confusion.size(); ++r) {
    out << report.row_cell_ids[r];
    for (const auto count : report.confusion[r]) out << ',' << count;
    out << ',' << report.unmatched_gt[r] << '\n';
  }
  out << "unmatched_found";
  for (const auto count : report.unmatched_found) out << ',' << count;
  out << ",0\n";
}

void write_ratios_json(const std::filesystem::path& path,
                       const eval::RatioReport& report) {
  json j;
  j["raw_bits_per_s"] = report.raw_bits_per_s.to_string();
  j["detected_bits_per_s"] = report.detected_bits_per_s.to_string();
  j["compressed_bits_per_s"] = report.compressed_bits_per_s.to_string();
  j["detected_ratio"] = report.detected_ratio.to_string();
  j["detected_ratio_value"] = report.detected_ratio.to_double();
  j["compressed_ratio"] = report.compressed_ratio.to_string();
  j["compressed_ratio_value"] = report.compressed_ratio.to_double();
  j["fold_compressed_over_detected"] =
      report.fold_compressed_over_detected.to_string();
  j["fold_compressed_over_detected_value"] =
      report.fold_compressed_over_detected.to_double();
  j["detected_overhead_bits"] = report.detected_overhead_bits;
  j["compressed_overhead_bits"] = report.compressed_overhead_bits;
  store_json(path, j);
}

void write_budget_json(const std::filesystem::path& path,
                       const eval::BudgetReport& report) {
  json j;
  j["cycles_per_period"] = report.cycles_per_period;
  j["max_concurrent_digitizations"] = report.max_concurrent_digitizations;
  j["compressor_channel_capacity"] = report.compressor_channel_capacity;
  j["channel_count"] = report.channel_count;
  store_json(path, j);
}

}  // namespace neuroramp::io
