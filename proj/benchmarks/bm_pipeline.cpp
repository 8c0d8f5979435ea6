#include "sonarnet/pipeline.hpp"
#include "sonarnet/synth.hpp"

#include <benchmark/benchmark.h>

using namespace sonarnet;

namespace {

wire::RawMeasurement bench_measurement(const PipelineConfig& cfg) {
    Scene scene;
    scene.noise_rms = 0.01;
    scene.seed = 7;
    scene.reflectors.push_back({1.5, 0.2, 0.0, 0.8});
    scene.reflectors.push_back({3.0, -0.4, 0.1, 0.5});
    return synthesize_measurement(cfg, scene, 1, 0, 0);
}

void BM_process_horizontal90(benchmark::State& state) {
    PipelineConfig cfg = default_pipeline_config(GridKind::horizontal90);
    cfg.processing_threads = static_cast<int>(state.range(0));
    Workspace ws(cfg);
    const auto m = bench_measurement(cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ws.process(m));
    }
}
BENCHMARK(BM_process_horizontal90)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_process_box1850(benchmark::State& state) {
    PipelineConfig cfg = default_pipeline_config(GridKind::box1850);
    Workspace ws(cfg);
    const auto m = bench_measurement(cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ws.process(m));
    }
}
BENCHMARK(BM_process_box1850)->Unit(benchmark::kMillisecond)->MinTime(2.0);

void BM_beamform(benchmark::State& state) {
    PipelineConfig cfg = default_pipeline_config(GridKind::horizontal90);
    Workspace ws(cfg);
    SignalMatrix filtered(kChannelCount, cfg.mf_samples(), cfg.mf_rate());
    for (size_t i = 0; i < filtered.data.size(); ++i) {
        filtered.data[i] = static_cast<double>(i % 97) / 97.0;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(ws.beamform(filtered));
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * 90);
}
BENCHMARK(BM_beamform)->Unit(benchmark::kMillisecond);

void BM_workspace_build(benchmark::State& state) {
    const PipelineConfig cfg = default_pipeline_config(GridKind::horizontal90);
    for (auto _ : state) {
        Workspace ws(cfg);
        benchmark::DoNotOptimize(&ws);
    }
}
BENCHMARK(BM_workspace_build)->Unit(benchmark::kMillisecond);

void BM_synthesize_measurement(benchmark::State& state) {
    const PipelineConfig cfg = default_pipeline_config(GridKind::horizontal90);
    Scene scene;
    scene.noise_rms = state.range(0) != 0 ? 0.01 : 0.0;
    scene.seed = 3;
    scene.reflectors.push_back({2.0, 0.0, 0.0, 0.9});
    for (auto _ : state) {
        benchmark::DoNotOptimize(synthesize_measurement(cfg, scene, 1, 0, 0));
    }
}
BENCHMARK(BM_synthesize_measurement)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

} // namespace
