#include <benchmark/benchmark.h>

#include <vector>

#include "neuroramp/adc.hpp"
#include "neuroramp/compress.hpp"
#include "neuroramp/link.hpp"
#include "neuroramp/rng.hpp"
#include "neuroramp/train.hpp"

using namespace neuroramp;

namespace {

compress::QuantizedPcaMemory bench_memory() {
  compress::QuantizedPcaMemory mem;
  Rng rng(0xBE7C);
  for (auto& row : mem.coefficients)
    for (auto& c : row)
      c = static_cast<std::int16_t>(static_cast<int>(rng.next_u64() % 512) - 256);
  mem.mac_shift = 10;  // headroom: no saturation on arbitrary inputs
  mem.scale = 400.0;
  return mem;
}

}  // namespace

static void BM_RampPeriod49(benchmark::State& state) {
  adc::RampConfig cfg;
  Rng rng(0x49);
  std::vector<double> held(49);
  for (auto& v : held) v = rng.uniform(0.0, 1.0);
  const std::vector<bool> gate(49, true);
  std::int64_t period = 0;
  for (auto _ : state) {
    auto result = adc::run_ramp_period(held, cfg, gate, period++);
    benchmark::DoNotOptimize(result);
  }
  state.SetItemsProcessed(state.iterations() * 49);
}
BENCHMARK(BM_RampPeriod49);

static void BM_DetectorStep(benchmark::State& state) {
  adc::TriggerConfig cfg;
  Rng rng(0xDE7);
  std::vector<int> codes(1 << 14);
  for (auto& c : codes) c = 100 + static_cast<int>(rng.next_u64() % 56);
  adc::ChannelTriggerState fsm;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        adc::dual_threshold_step(fsm, codes[i++ & (codes.size() - 1)], cfg));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DetectorStep);

// Streaming MAC throughput; the real-time reference point is one sample per
// 16 MHz clock cycle.
static void BM_CompressorStream(benchmark::State& state) {
  const auto mem = bench_memory();
  const int channels = static_cast<int>(state.range(0));
  std::vector<compress::StreamItem> items;
  for (int i = 0; i < 22; ++i)
    for (int ch = 0; ch < channels; ++ch) {
      compress::StreamItem item;
      item.channel = ch;
      item.period_index = i;
      item.code = 96 + ((i * 13 + ch) % 64);
      item.action = i == 1 ? adc::TriggerAction::kConfirmSpike
                           : adc::TriggerAction::kDigitize;
      items.push_back(item);
    }
  for (auto _ : state) {
    auto result = compress::process_stream(items, mem, channels);
    benchmark::DoNotOptimize(result);
  }
  state.SetItemsProcessed(state.iterations() * items.size());
}
BENCHMARK(BM_CompressorStream)->Arg(49)->Arg(800);

static void BM_PcaBasisFit(benchmark::State& state) {
  Rng rng(0x9CA);
  train::SpikeMatrix rows;
  for (int r = 0; r < 2000; ++r) {
    std::vector<double> row(22);
    for (auto& v : row) v = rng.gaussian() * 8.0;
    rows.push_back(row);
  }
  for (auto _ : state) {
    auto basis = train::compute_pca_basis(rows, 4);
    benchmark::DoNotOptimize(basis);
  }
}
BENCHMARK(BM_PcaBasisFit);

static void BM_FrameCodec(benchmark::State& state) {
  Rng rng(0xF4);
  std::vector<std::uint8_t> payload(99);
  for (auto& b : payload) b = static_cast<std::uint8_t>(rng.next_u64());
  for (auto _ : state) {
    const auto chips = link::frame_config(payload);
    benchmark::DoNotOptimize(link::parse_frame(chips));
  }
  state.SetItemsProcessed(state.iterations() * payload.size());
}
BENCHMARK(BM_FrameCodec);

BENCHMARK_MAIN();
