#include "sonarnet/dsp.hpp"
#include "sonarnet/rng.hpp"
#include "sonarnet/synth.hpp"

#include <benchmark/benchmark.h>

using namespace sonarnet;

namespace {

SignalMatrix random_signal(size_t channels, size_t samples, double fs) {
    Rng rng(1);
    SignalMatrix m(channels, samples, fs);
    for (double& v : m.data) v = rng.uniform(-1.0, 1.0);
    return m;
}

void BM_fft_convolve(benchmark::State& state) {
    const auto len = static_cast<size_t>(state.range(0));
    const auto klen = static_cast<size_t>(state.range(1));
    const auto x = random_signal(1, len, 450000.0);
    const auto k = design_lowpass(45000.0, 450000.0, static_cast<int>(klen));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fft_convolve(x, k, true));
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(len));
}
BENCHMARK(BM_fft_convolve)->Args({4096, 63})->Args({16384, 255})->Args({65536, 1023});

void BM_pdm_demodulate(benchmark::State& state) {
    Rng rng(2);
    PdmBitMatrix bits;
    bits.channels = 32;
    bits.frames = static_cast<size_t>(state.range(0));
    bits.pdm_rate = 4.5e6;
    bits.bits.resize(32 * bits.frames);
    for (int8_t& b : bits.bits) b = rng.uniform() < 0.5 ? int8_t{-1} : int8_t{1};
    const DemodConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pdm_demodulate(bits, cfg));
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(32 * bits.frames));
}
BENCHMARK(BM_pdm_demodulate)->Arg(20000)->Arg(144800);

void BM_sigma_delta(benchmark::State& state) {
    const auto x = random_signal(32, static_cast<size_t>(state.range(0)), 4.5e6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sigma_delta_modulate(x));
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(x.data.size()));
}
BENCHMARK(BM_sigma_delta)->Arg(20000)->Arg(144800);

void BM_envelope(benchmark::State& state) {
    const auto x = random_signal(1, static_cast<size_t>(state.range(0)), 225000.0);
    const auto smoothing = design_lowpass(10000.0, 225000.0, 127);
    for (auto _ : state) {
        benchmark::DoNotOptimize(envelope(x, &smoothing));
    }
}
BENCHMARK(BM_envelope)->Arg(7240);

} // namespace
