#include <benchmark/benchmark.h>

#include "mcsa/bss.hpp"
#include "mcsa/multirate.hpp"
#include "mcsa/pipeline.hpp"
#include "mcsa/signal_model.hpp"
#include "mcsa/stft.hpp"

namespace {

using namespace mcsa;

MultiChannelRecord bench_record(double fs, double duration_s) {
  OperatingPoint op;
  return generate_drive_record(op, {Healthy{}}, Gaussian{0.1}, fs, duration_s, 1, 1);
}

void BM_Stft(benchmark::State& state) {
  const auto rec = bench_record(50000.0, 2.0);
  StftConfig cfg;
  cfg.window_len = static_cast<std::size_t>(state.range(0));
  cfg.hop = cfg.window_len / 2;
  for (auto _ : state) {
    auto s = stft(rec, 0, cfg);
    benchmark::DoNotOptimize(s.magnitudes.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(rec.length()));
}
BENCHMARK(BM_Stft)->Arg(256)->Arg(1024)->Arg(4096);

void BM_Decimate(benchmark::State& state) {
  const auto rec = bench_record(50000.0, 2.0);
  const auto m = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    auto out = decimate(rec, m);
    benchmark::DoNotOptimize(out.channels.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(rec.length() * rec.channel_count()));
}
BENCHMARK(BM_Decimate)->Arg(2)->Arg(8)->Arg(16);

void BM_IcaFit(benchmark::State& state) {
  SourceSet sources = generate_sources(
      {SineSource{50.0}, SawtoothSource{13.0}, SquareSource{7.0}, UniformSource{1.0}},
      2000.0, static_cast<double>(state.range(0)), 3);
  const MixingMatrix a = random_mixing_matrix(4, 5);
  const auto mixed = mix_sources(a, sources);
  const auto [white, whitener] = center_whiten(mixed);
  IcaConfig cfg;
  cfg.max_iterations = 120;
  cfg.tolerance = 1e-5;
  for (auto _ : state) {
    auto fit = ica_fit(white, cfg);
    benchmark::DoNotOptimize(fit.final_objective);
  }
}
BENCHMARK(BM_IcaFit)->Arg(2)->Arg(4);

void BM_PipelineUnit(benchmark::State& state) {
  PipelineConfig cfg;  // 50 kHz defaults
  cfg.ica.max_iterations = static_cast<std::size_t>(state.range(0));
  const auto rec = bench_record(cfg.sample_rate_hz, 2.0);
  SignatureLibrary lib;
  lib.schema = cfg.features.names();
  lib.normalization.assign(lib.schema.size(), 1.0);
  for (auto _ : state) {
    auto report = run_analyze(cfg, rec, lib);
    benchmark::DoNotOptimize(report.windows.data());
  }
}
BENCHMARK(BM_PipelineUnit)->Arg(120)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
