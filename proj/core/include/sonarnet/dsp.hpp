#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sonarnet {

// Bipolar 1-bit capture: values are exactly -1 or +1, stored channel-major.
struct PdmBitMatrix {
    int channels = 0;
    size_t frames = 0;
    double pdm_rate = 0.0;
    std::vector<int8_t> bits; // channels * frames, channel-major

    int8_t* channel(int c) { return bits.data() + static_cast<size_t>(c) * frames; }
    const int8_t* channel(int c) const { return bits.data() + static_cast<size_t>(c) * frames; }
};

// Real-valued multichannel signal, channel-major storage.
struct SignalMatrix {
    size_t channels = 0;
    size_t samples = 0;
    double sample_rate = 0.0;
    std::vector<double> data; // channels * samples

    SignalMatrix() = default;
    SignalMatrix(size_t channels_, size_t samples_, double sample_rate_)
        : channels(channels_), samples(samples_), sample_rate(sample_rate_),
          data(channels_ * samples_, 0.0) {}

    double* channel(size_t c) { return data.data() + c * samples; }
    const double* channel(size_t c) const { return data.data() + c * samples; }
    std::span<double> channel_span(size_t c) { return {channel(c), samples}; }
    std::span<const double> channel_span(size_t c) const { return {channel(c), samples}; }
};

// Linear FM sweep parameters.
struct ChirpParams {
    double f_start = 90e3;  // Hz
    double f_end = 25e3;    // Hz
    double duration = 3e-3; // seconds
    double sample_rate = 4.5e6;

    size_t length() const;
    void validate() const; // throws ConfigError
};

// Linear-phase FIR: odd tap count, symmetric coefficients.
struct FirKernel {
    std::vector<double> taps;
    double cutoff_hz = 0.0;

    size_t size() const { return taps.size(); }
};

struct DemodConfig {
    double cutoff_hz = 126e3;
    int taps = 255;
    int decimation = 10;
};

// --- Operations -----------------------------------------------------------

// Packed layout: frame-major interleave. Bit index = frame * channels +
// channel, MSB-first within each byte; bit 1 -> +1, bit 0 -> -1.
PdmBitMatrix unpack_pdm(std::span<const uint8_t> packed, int channels, size_t frames,
                        double pdm_rate);

// Hamming-windowed sinc, unit DC gain.
FirKernel design_lowpass(double cutoff_hz, double sample_rate, int taps);

// Complex frequency response magnitude of a kernel at the given frequency.
double fir_magnitude(const FirKernel& kernel, double freq_hz, double sample_rate);

// Per-channel linear convolution via zero-padded FFTs. With
// compensate_delay the result is advanced by (taps-1)/2 and truncated to
// the input length, so a symmetric kernel introduces no net delay; without
// it the full length-(L+K-1) convolution is returned.
SignalMatrix fft_convolve(const SignalMatrix& signals, std::span<const double> kernel,
                          bool compensate_delay);
SignalMatrix fft_convolve(const SignalMatrix& signals, const FirKernel& kernel,
                          bool compensate_delay);

// Low-pass (design_lowpass of cfg) then keep every cfg.decimation-th
// sample. Output rate = pdm_rate / decimation.
SignalMatrix pdm_demodulate(const PdmBitMatrix& bits, const DemodConfig& cfg);

// s(t) = sin(2*pi*(f_start*t + (f_end-f_start)/(2*duration)*t^2)).
SignalMatrix generate_chirp(const ChirpParams& p);

// Cross-correlation with the reference, aligned so a reference copy
// starting at sample n peaks at sample n. Output length = input length.
SignalMatrix matched_filter(const SignalMatrix& signals, std::span<const double> reference);

// Magnitude of the analytic signal; if smoothing is non-null it is applied
// afterwards with group delay compensated.
SignalMatrix envelope(const SignalMatrix& signals, const FirKernel* smoothing = nullptr);

// Anti-alias low-pass at 0.45*fs/factor, then keep every factor-th sample.
// factor == 1 is the identity.
SignalMatrix decimate(const SignalMatrix& signals, int factor);

// Tap count used by decimate's anti-alias filter for a given factor.
int decimation_filter_taps(int factor);

// --- Debug serialization (SGMX) -------------------------------------------
// Little-endian: u32 magic 0x53474D58, u32 channels, u64 samples,
// f64 sample_rate, then row-major f32 samples.

void save_signal(const SignalMatrix& m, std::ostream& out);
void save_signal_file(const SignalMatrix& m, const std::string& path);
SignalMatrix load_signal(std::istream& in);
SignalMatrix load_signal_file(const std::string& path);

} // namespace sonarnet
