#include "sonarnet/dsp.hpp"

#include "sonarnet/detail/bytes.hpp"
#include "sonarnet/detail/filters.hpp"
#include "sonarnet/errors.hpp"
#include "sonarnet/fft.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

namespace sonarnet {

namespace {

constexpr uint32_t kSignalMagic = 0x53474D58; // "SGMX"

// Linear convolution of one channel against a kernel spectrum, evaluated at
// output indices [advance, advance + out_len). Indices beyond the full
// convolution read as zero.
class SpectralConvolver {
public:
    SpectralConvolver(std::span<const double> kernel, size_t signal_len)
        : signal_len_(signal_len), kernel_len_(kernel.size()),
          fft_size_(next_pow2(signal_len + kernel.size() - 1)), fft_(fft_size_),
          kernel_spec_(fft_size_ / 2 + 1), signal_spec_(fft_size_ / 2 + 1),
          padded_(fft_size_, 0.0), result_(fft_size_, 0.0) {
        std::copy(kernel.begin(), kernel.end(), padded_.begin());
        fft_.forward(padded_.data(), kernel_spec_.data());
        std::fill(padded_.begin(), padded_.begin() + static_cast<long>(kernel.size()), 0.0);
    }

    void run(const double* in, double* out, size_t advance, size_t out_len) {
        std::copy(in, in + signal_len_, padded_.begin());
        fft_.forward(padded_.data(), signal_spec_.data());
        for (size_t i = 0; i < signal_spec_.size(); ++i) signal_spec_[i] *= kernel_spec_[i];
        fft_.inverse(signal_spec_.data(), result_.data());
        const size_t full = signal_len_ + kernel_len_ - 1;
        for (size_t i = 0; i < out_len; ++i) {
            const size_t src = i + advance;
            out[i] = src < full ? result_[src] : 0.0;
        }
    }

private:
    size_t signal_len_;
    size_t kernel_len_;
    size_t fft_size_;
    RealFft fft_;
    std::vector<std::complex<double>> kernel_spec_;
    std::vector<std::complex<double>> signal_spec_;
    std::vector<double> padded_;
    std::vector<double> result_;
};

SignalMatrix convolve_with_advance(const SignalMatrix& signals, std::span<const double> kernel,
                                   size_t advance, size_t out_len) {
    SignalMatrix out(signals.channels, out_len, signals.sample_rate);
    SpectralConvolver conv(kernel, signals.samples);
    for (size_t c = 0; c < signals.channels; ++c) {
        conv.run(signals.channel(c), out.channel(c), advance, out_len);
    }
    return out;
}

void check_convolve_args(const SignalMatrix& signals, std::span<const double> kernel) {
    if (signals.channels == 0 || signals.samples == 0) {
        throw ArgumentError("fft_convolve: empty signal");
    }
    if (kernel.empty()) throw ArgumentError("fft_convolve: empty kernel");
    if (kernel.size() > signals.samples) {
        throw ArgumentError("fft_convolve: kernel length " + std::to_string(kernel.size()) +
                            " exceeds signal length " + std::to_string(signals.samples));
    }
}

} // namespace

size_t ChirpParams::length() const {
    return static_cast<size_t>(std::llround(duration * sample_rate));
}

void ChirpParams::validate() const {
    if (sample_rate <= 0.0) throw ConfigError("chirp: sample_rate must be > 0");
    if (duration <= 0.0) throw ConfigError("chirp: duration must be > 0");
    if (f_start <= 0.0 || f_start >= sample_rate / 2) {
        throw ConfigError("chirp: f_start must lie in (0, sample_rate/2)");
    }
    if (f_end <= 0.0 || f_end >= sample_rate / 2) {
        throw ConfigError("chirp: f_end must lie in (0, sample_rate/2)");
    }
}

PdmBitMatrix unpack_pdm(std::span<const uint8_t> packed, int channels, size_t frames,
                        double pdm_rate) {
    if (channels <= 0) throw ArgumentError("unpack_pdm: channels must be > 0");
    if (frames % 8 != 0) {
        throw DecodeError("unpack_pdm: frame count " + std::to_string(frames) +
                          " not divisible by 8");
    }
    const size_t expected = static_cast<size_t>(channels) * frames / 8;
    if (packed.size() != expected) {
        throw DecodeError("unpack_pdm: payload is " + std::to_string(packed.size()) +
                          " bytes, expected " + std::to_string(expected));
    }

    PdmBitMatrix m;
    m.channels = channels;
    m.frames = frames;
    m.pdm_rate = pdm_rate;
    m.bits.resize(static_cast<size_t>(channels) * frames);
    // Frame-major interleave, MSB first.
    for (size_t f = 0; f < frames; ++f) {
        const size_t base = f * static_cast<size_t>(channels);
        for (int c = 0; c < channels; ++c) {
            const size_t bit_index = base + static_cast<size_t>(c);
            const uint8_t byte = packed[bit_index / 8];
            const int bit = (byte >> (7 - (bit_index % 8))) & 1;
            m.bits[static_cast<size_t>(c) * frames + f] = bit ? int8_t{1} : int8_t{-1};
        }
    }
    return m;
}

FirKernel design_lowpass(double cutoff_hz, double sample_rate, int taps) {
    if (!(cutoff_hz > 0.0 && cutoff_hz < sample_rate / 2)) {
        throw ConfigError("design_lowpass: cutoff " + std::to_string(cutoff_hz) +
                          " Hz outside (0, " + std::to_string(sample_rate / 2) + ")");
    }
    if (taps < 3 || taps % 2 == 0) {
        throw ConfigError("design_lowpass: taps must be odd and >= 3");
    }

    constexpr double pi = std::numbers::pi;
    const double fc = cutoff_hz / sample_rate; // cycles per sample
    const int mid = (taps - 1) / 2;
    FirKernel k;
    k.cutoff_hz = cutoff_hz;
    k.taps.resize(static_cast<size_t>(taps));
    for (int n = 0; n < taps; ++n) {
        const int m = n - mid;
        const double sinc = m == 0 ? 2.0 * fc : std::sin(2.0 * pi * fc * m) / (pi * m);
        const double window = 0.54 - 0.46 * std::cos(2.0 * pi * n / (taps - 1));
        k.taps[static_cast<size_t>(n)] = sinc * window;
    }
    // Force an exact null at Nyquist so alternating-sign inputs (the
    // sigma-delta idle tone) cancel completely, then renormalize DC. The
    // correction is tens of dB below the stopband floor.
    double nyquist = 0.0;
    for (int n = 0; n < taps; ++n) {
        nyquist += (n % 2 == 0 ? k.taps[static_cast<size_t>(n)]
                               : -k.taps[static_cast<size_t>(n)]);
    }
    const double correction = nyquist / taps;
    double sum = 0.0;
    for (int n = 0; n < taps; ++n) {
        k.taps[static_cast<size_t>(n)] -= (n % 2 == 0 ? correction : -correction);
        sum += k.taps[static_cast<size_t>(n)];
    }
    for (double& t : k.taps) t /= sum;
    return k;
}

double fir_magnitude(const FirKernel& kernel, double freq_hz, double sample_rate) {
    const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate;
    std::complex<double> response{0.0, 0.0};
    for (size_t n = 0; n < kernel.taps.size(); ++n) {
        response += kernel.taps[n] * std::polar(1.0, -w * static_cast<double>(n));
    }
    return std::abs(response);
}

SignalMatrix fft_convolve(const SignalMatrix& signals, std::span<const double> kernel,
                          bool compensate_delay) {
    check_convolve_args(signals, kernel);
    if (kernel.size() == 1) {
        // Scaling needs no transform and stays exact.
        SignalMatrix out = signals;
        for (double& v : out.data) v *= kernel[0];
        return out;
    }
    if (compensate_delay) {
        return convolve_with_advance(signals, kernel, (kernel.size() - 1) / 2, signals.samples);
    }
    return convolve_with_advance(signals, kernel, 0, signals.samples + kernel.size() - 1);
}

SignalMatrix fft_convolve(const SignalMatrix& signals, const FirKernel& kernel,
                          bool compensate_delay) {
    return fft_convolve(signals, std::span<const double>(kernel.taps), compensate_delay);
}

SignalMatrix pdm_demodulate(const PdmBitMatrix& bits, const DemodConfig& cfg) {
    if (cfg.decimation < 1) throw ConfigError("pdm_demodulate: decimation must be >= 1");
    if (bits.frames == 0 || bits.channels <= 0) {
        throw ArgumentError("pdm_demodulate: empty bit matrix");
    }
    if (bits.frames % static_cast<size_t>(cfg.decimation) != 0) {
        throw ConfigError("pdm_demodulate: decimation " + std::to_string(cfg.decimation) +
                          " does not divide frame count " + std::to_string(bits.frames));
    }

    const FirKernel lp = design_lowpass(cfg.cutoff_hz, bits.pdm_rate, cfg.taps);
    const size_t taps = lp.size();
    const size_t out_len = bits.frames / static_cast<size_t>(cfg.decimation);

    // Filtered value at compensated index p = m*D + (taps-1)/2:
    //   y[m] = sum_k lp[k] * x[p - k]
    // computed as a forward dot product against the reversed taps so the
    // inner loop runs over contiguous memory.
    std::vector<double> rev(lp.taps.rbegin(), lp.taps.rend());
    std::vector<double> expanded(bits.frames);

    SignalMatrix out(static_cast<size_t>(bits.channels), out_len, bits.pdm_rate / cfg.decimation);
    const long start = -static_cast<long>((taps - 1) / 2);
    for (int c = 0; c < bits.channels; ++c) {
        const int8_t* src = bits.channel(c);
        for (size_t i = 0; i < bits.frames; ++i) expanded[i] = src[i];
        detail::strided_filter(expanded.data(), bits.frames, rev, start, cfg.decimation,
                               out.channel(static_cast<size_t>(c)), out_len);
    }
    return out;
}

SignalMatrix generate_chirp(const ChirpParams& p) {
    p.validate();
    const size_t n = p.length();
    SignalMatrix out(1, n, p.sample_rate);
    const double slope = (p.f_end - p.f_start) / (2.0 * p.duration);
    double* s = out.channel(0);
    for (size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / p.sample_rate;
        s[i] = std::sin(2.0 * std::numbers::pi * (p.f_start * t + slope * t * t));
    }
    return out;
}

SignalMatrix matched_filter(const SignalMatrix& signals, std::span<const double> reference) {
    check_convolve_args(signals, reference);
    // Convolving with the time-reversed reference places the correlation
    // peak for a copy starting at n at index n + K - 1; advancing by K - 1
    // aligns it back to n.
    std::vector<double> reversed(reference.rbegin(), reference.rend());
    return convolve_with_advance(signals, reversed, reference.size() - 1, signals.samples);
}

SignalMatrix envelope(const SignalMatrix& signals, const FirKernel* smoothing) {
    if (signals.channels == 0 || signals.samples < 2) {
        throw ArgumentError("envelope: need at least 2 samples per channel");
    }
    const size_t n = signals.samples;
    const size_t fft_size = next_pow2(n);
    RealFft fft(fft_size);
    ComplexFft cfft(fft_size);
    std::vector<double> padded(fft_size, 0.0);
    std::vector<std::complex<double>> spec(fft_size / 2 + 1);
    std::vector<std::complex<double>> analytic_spec(fft_size);
    std::vector<std::complex<double>> analytic(fft_size);

    SignalMatrix out(signals.channels, n, signals.sample_rate);
    for (size_t c = 0; c < signals.channels; ++c) {
        std::copy_n(signals.channel(c), n, padded.begin());
        std::fill(padded.begin() + static_cast<long>(n), padded.end(), 0.0);
        fft.forward(padded.data(), spec.data());
        // Analytic signal: keep DC and Nyquist, double positive bins,
        // zero negative bins.
        std::fill(analytic_spec.begin(), analytic_spec.end(), std::complex<double>{0.0, 0.0});
        analytic_spec[0] = spec[0];
        for (size_t i = 1; i < fft_size / 2; ++i) analytic_spec[i] = 2.0 * spec[i];
        analytic_spec[fft_size / 2] = spec[fft_size / 2];
        cfft.inverse(analytic_spec.data(), analytic.data());
        double* dst = out.channel(c);
        for (size_t i = 0; i < n; ++i) dst[i] = std::abs(analytic[i]);
    }
    if (smoothing != nullptr) {
        out = fft_convolve(out, *smoothing, true);
    }
    return out;
}

int decimation_filter_taps(int factor) {
    const int taps = std::clamp(32 * factor, 63, 1023);
    return taps % 2 == 0 ? taps + 1 : taps;
}

SignalMatrix decimate(const SignalMatrix& signals, int factor) {
    if (factor < 1) throw ArgumentError("decimate: factor must be >= 1");
    if (factor == 1) return signals;
    if (signals.channels == 0 || signals.samples == 0) {
        throw ArgumentError("decimate: empty signal");
    }

    const FirKernel aa =
        design_lowpass(0.45 * signals.sample_rate / factor, signals.sample_rate,
                       decimation_filter_taps(factor));
    const size_t out_len = (signals.samples + static_cast<size_t>(factor) - 1) /
                           static_cast<size_t>(factor);
    std::vector<double> rev(aa.taps.rbegin(), aa.taps.rend());

    SignalMatrix out(signals.channels, out_len, signals.sample_rate / factor);
    const long start = -static_cast<long>((aa.size() - 1) / 2);
    for (size_t c = 0; c < signals.channels; ++c) {
        detail::strided_filter(signals.channel(c), signals.samples, rev, start, factor,
                               out.channel(c), out_len);
    }
    return out;
}

void save_signal(const SignalMatrix& m, std::ostream& out) {
    std::vector<uint8_t> bytes;
    bytes.reserve(24 + m.data.size() * 4);
    detail::append<uint32_t>(bytes, kSignalMagic);
    detail::append<uint32_t>(bytes, static_cast<uint32_t>(m.channels));
    detail::append<uint64_t>(bytes, static_cast<uint64_t>(m.samples));
    detail::append<double>(bytes, m.sample_rate);
    for (double v : m.data) detail::append<float>(bytes, static_cast<float>(v));
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

void save_signal_file(const SignalMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create signal file: " + path);
    save_signal(m, out);
    if (!out.good()) throw IoError("failed writing signal file: " + path);
}

SignalMatrix load_signal(std::istream& in) {
    std::vector<uint8_t> bytes{std::istreambuf_iterator<char>(in),
                               std::istreambuf_iterator<char>()};
    detail::ByteReader r({bytes.data(), bytes.size()}, "SGMX");
    const auto magic = r.read<uint32_t>();
    if (magic != kSignalMagic) {
        std::ostringstream msg;
        msg << "SGMX: bad magic 0x" << std::hex << magic;
        throw DecodeError(msg.str());
    }
    SignalMatrix m;
    m.channels = r.read<uint32_t>();
    m.samples = r.read<uint64_t>();
    m.sample_rate = r.read<double>();
    m.data.resize(m.channels * m.samples);
    for (double& v : m.data) v = r.read<float>();
    return m;
}

SignalMatrix load_signal_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open signal file: " + path);
    return load_signal(in);
}

} // namespace sonarnet
