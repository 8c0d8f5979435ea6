#include "sonarnet/pipeline.hpp"

#include "sonarnet/detail/bytes.hpp"
#include "sonarnet/detail/filters.hpp"
#include "sonarnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <exception>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

namespace sonarnet {

namespace {

constexpr uint32_t kImageMagic = 0x41494D47; // "AIMG"
constexpr uint16_t kImageVersion = 1;

// 32x32 bit-matrix transpose (Hacker's Delight). Word f carries channel c
// at bit 31-c on input; word c carries frame f at bit 31-f on output.
void transpose32(uint32_t a[32]) {
    uint32_t m = 0x0000FFFFu;
    for (uint32_t j = 16; j != 0; j >>= 1, m ^= (m << j)) {
        for (uint32_t k = 0; k < 32; k = (k + j + 1) & ~j) {
            const uint32_t t = (a[k] ^ (a[k + j] >> j)) & m;
            a[k] ^= t;
            a[k + j] ^= (t << j);
        }
    }
}

} // namespace

size_t PipelineConfig::frames() const {
    const double window = 2.0 * max_range / speed_of_sound + chirp.duration;
    const auto raw = static_cast<size_t>(std::ceil(window * pdm_rate));
    const size_t stage = static_cast<size_t>(demod.decimation) *
                         static_cast<size_t>(pre_mf_decimation) *
                         static_cast<size_t>(post_envelope_decimation);
    const size_t step = std::lcm<size_t>(8, stage);
    return (raw + step - 1) / step * step;
}

size_t PipelineConfig::range_bins() const {
    return static_cast<size_t>(std::floor(2.0 * max_range / speed_of_sound * final_rate()));
}

ChirpParams PipelineConfig::chirp_at(double sample_rate) const {
    ChirpParams p = chirp;
    p.sample_rate = sample_rate;
    return p;
}

void PipelineConfig::validate() const {
    if (directions.size() == 0) throw ConfigError("pipeline: empty direction set");
    if (pdm_rate <= 0.0) throw ConfigError("pipeline: pdm_rate must be > 0");
    if (demod.decimation < 1 || pre_mf_decimation < 1 || post_envelope_decimation < 1) {
        throw ConfigError("pipeline: decimation factors must be >= 1");
    }
    if (demod.taps < 3 || demod.taps % 2 == 0) {
        throw ConfigError("pipeline: demod taps must be odd and >= 3");
    }
    if (envelope_smoothing.taps < 3 || envelope_smoothing.taps % 2 == 0) {
        throw ConfigError("pipeline: envelope smoothing taps must be odd and >= 3");
    }
    if (speed_of_sound <= 0.0) throw ConfigError("pipeline: speed_of_sound must be > 0");
    if (max_range <= 0.0) throw ConfigError("pipeline: max_range must be > 0");
    if (processing_threads < 0) {
        throw ConfigError("pipeline: processing_threads must be >= 0");
    }
    chirp_at(pdm_rate).validate();
    chirp_at(mf_rate()).validate(); // sweep must fit below the matched-filter Nyquist
    if (!(demod.cutoff_hz > 0.0 && demod.cutoff_hz < pdm_rate / 2)) {
        throw ConfigError("pipeline: demod cutoff outside (0, pdm_rate/2)");
    }
    if (!(envelope_smoothing.cutoff_hz > 0.0 && envelope_smoothing.cutoff_hz < mf_rate() / 2)) {
        throw ConfigError("pipeline: envelope smoothing cutoff outside (0, mf_rate/2)");
    }
    if (range_bins() < 1) throw ConfigError("pipeline: derived range-bin count is zero");
    if (chirp_at(mf_rate()).length() > mf_samples()) {
        throw ConfigError("pipeline: reference chirp longer than the processed window");
    }
    if (chirp_at(mf_rate()).length() < 2) {
        throw ConfigError("pipeline: reference chirp shorter than 2 samples");
    }
}

PipelineConfig default_pipeline_config(GridKind kind) {
    PipelineConfig cfg;
    cfg.directions = direction_grid(kind);
    cfg.chirp.sample_rate = cfg.pdm_rate;
    return cfg;
}

std::pair<size_t, size_t> AcousticImage::argmax() const {
    size_t best = 0;
    for (size_t i = 1; i < energies.size(); ++i) {
        if (energies[i] > energies[best]) best = i;
    }
    return {best / range_bins, best % range_bins};
}

std::vector<uint8_t> image_to_bytes(const AcousticImage& image) {
    std::vector<uint8_t> out;
    out.reserve(34 + image.directions.size() * 8 + image.energies.size() * 4);
    detail::append<uint32_t>(out, kImageMagic);
    detail::append<uint16_t>(out, kImageVersion);
    detail::append<uint32_t>(out, image.sensor_serial);
    detail::append<uint64_t>(out, image.timestamp_us);
    detail::append<uint32_t>(out, static_cast<uint32_t>(image.directions.size()));
    detail::append<uint32_t>(out, static_cast<uint32_t>(image.range_bins));
    detail::append<double>(out, image.range_bin_size);
    for (const Direction& d : image.directions.directions) {
        detail::append<float>(out, static_cast<float>(d.azimuth));
        detail::append<float>(out, static_cast<float>(d.elevation));
    }
    for (float e : image.energies) detail::append<float>(out, e);
    return out;
}

AcousticImage image_from_bytes(std::span<const uint8_t> bytes) {
    detail::ByteReader r(bytes, "AIMG");
    const auto magic = r.read<uint32_t>();
    if (magic != kImageMagic) {
        std::ostringstream msg;
        msg << "AIMG: bad magic 0x" << std::hex << magic;
        throw DecodeError(msg.str());
    }
    const auto version = r.read<uint16_t>();
    if (version != kImageVersion) {
        throw DecodeError("AIMG: unsupported version " + std::to_string(version));
    }
    AcousticImage image;
    image.sensor_serial = r.read<uint32_t>();
    image.timestamp_us = r.read<uint64_t>();
    const auto n_dirs = r.read<uint32_t>();
    const auto n_bins = r.read<uint32_t>();
    image.range_bin_size = r.read<double>();
    image.range_bins = n_bins;
    image.directions.kind = GridKind::custom;
    image.directions.directions.reserve(n_dirs);
    constexpr double pi = std::numbers::pi;
    for (uint32_t i = 0; i < n_dirs; ++i) {
        // f32 widening can overshoot the bounds by an ulp; clamp back.
        const double az = std::clamp<double>(r.read<float>(), -pi, pi);
        const double el = std::clamp<double>(r.read<float>(), -pi / 2, pi / 2);
        image.directions.directions.emplace_back(az, el);
    }
    image.energies.resize(static_cast<size_t>(n_dirs) * n_bins);
    r.require(image.energies.size() * 4);
    for (float& e : image.energies) e = r.read<float>();
    return image;
}

void save_image_file(const AcousticImage& image, const std::string& path) {
    const auto bytes = image_to_bytes(image);
    detail::write_file(path, {bytes.data(), bytes.size()});
}

AcousticImage load_image_file(const std::string& path) {
    const auto bytes = detail::read_file(path);
    return image_from_bytes({bytes.data(), bytes.size()});
}

void save_image_csv(const AcousticImage& image, std::ostream& out) {
    out << "direction_index,azimuth_rad,elevation_rad,range_m,energy\n";
    for (size_t d = 0; d < image.directions.size(); ++d) {
        const Direction& dir = image.directions[d];
        for (size_t k = 0; k < image.range_bins; ++k) {
            out << d << ',' << dir.azimuth << ',' << dir.elevation << ','
                << image.range_for_bin(k) << ',' << image.at(d, k) << '\n';
        }
    }
}

void save_image_csv_file(const AcousticImage& image, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot create csv file: " + path);
    save_image_csv(image, out);
    if (!out.good()) throw IoError("failed writing csv file: " + path);
}

// --------------------------------------------------------------------------

struct Workspace::Impl {
    PipelineConfig cfg;

    size_t frames = 0;
    size_t row_bytes = 0;   // packed bytes per channel row
    size_t row_stride = 0;  // row_bytes plus padding for the LUT tail read
    size_t demod_len = 0;   // samples at the demodulated rate
    size_t mf_len = 0;      // samples at the matched-filter rate
    size_t ref_len = 0;     // reference chirp length at mf rate
    size_t n_dirs = 0;
    size_t bins = 0;

    // Fused unpack+demodulate: per-channel packed bit rows and a lookup
    // table mapping (alignment, octet, byte value) to the partial dot
    // product of the demod filter with that byte's bipolar bits.
    std::vector<uint8_t> bit_rows;
    std::vector<double> demod_rev;
    std::vector<double> demod_lut;
    size_t lut_octets = 0;

    std::vector<double> demod_buf; // 32 x demod_len
    std::vector<double> premf_rev;
    std::vector<double> mf_buf; // 32 x mf_len

    RealFft mf_fft;
    std::vector<std::complex<double>> ref_spec;
    std::vector<double> mf_pad;
    std::vector<std::complex<double>> mf_spec;
    std::vector<double> mf_result;
    std::vector<double> filt_buf; // 32 x mf_len

    std::vector<int32_t> delays;   // n_dirs x 32, at mf rate
    std::vector<int32_t> advances; // n_dirs

    // Per-thread scratch for the direction loop: directions are disjoint,
    // so results do not depend on the thread count.
    struct DirectionScratch {
        RealFft env_fft;
        std::vector<double> beam;
        std::vector<double> env_pad;
        std::vector<std::complex<double>> env_spec;
        std::vector<double> hilbert;
        std::vector<double> env_row;
        std::vector<double> final_row;

        DirectionScratch(size_t fft_size, size_t mf_len, size_t bins)
            : env_fft(fft_size), beam(mf_len, 0.0), env_pad(fft_size, 0.0),
              env_spec(fft_size / 2 + 1), hilbert(fft_size, 0.0), env_row(mf_len, 0.0),
              final_row(bins, 0.0) {}
    };
    std::vector<std::unique_ptr<DirectionScratch>> scratch;
    int threads = 1;

    // Smoothing and post-envelope anti-alias collapse into one composite
    // kernel evaluated only at kept output positions.
    std::vector<double> smooth_decimate_rev;

    size_t alloc_events = 0;

    explicit Impl(PipelineConfig c)
        : cfg(std::move(c)),
          frames(cfg.frames()),
          row_bytes(cfg.frames() / 8),
          demod_len(cfg.demod_samples()),
          mf_len(cfg.mf_samples()),
          ref_len(cfg.chirp_at(cfg.mf_rate()).length()),
          n_dirs(cfg.directions.size()),
          bins(cfg.range_bins()),
          mf_fft(next_pow2(cfg.mf_samples() + cfg.chirp_at(cfg.mf_rate()).length() - 1)) {
        const FirKernel demod_lp = design_lowpass(cfg.demod.cutoff_hz, cfg.pdm_rate,
                                                  cfg.demod.taps);
        demod_rev.assign(demod_lp.taps.rbegin(), demod_lp.taps.rend());
        build_demod_lut();
        row_stride = row_bytes + lut_octets;
        bit_rows.assign(size_t{kChannelCount} * row_stride, 0);

        demod_buf.assign(size_t{kChannelCount} * demod_len, 0.0);
        const FirKernel premf =
            design_lowpass(0.45 * cfg.demod_rate() / cfg.pre_mf_decimation, cfg.demod_rate(),
                           decimation_filter_taps(cfg.pre_mf_decimation));
        premf_rev.assign(premf.taps.rbegin(), premf.taps.rend());
        mf_buf.assign(size_t{kChannelCount} * mf_len, 0.0);

        const SignalMatrix ref = generate_chirp(cfg.chirp_at(cfg.mf_rate()));
        std::vector<double> padded(mf_fft.size(), 0.0);
        std::reverse_copy(ref.channel(0), ref.channel(0) + ref_len, padded.begin());
        ref_spec.resize(mf_fft.bins());
        mf_fft.forward(padded.data(), ref_spec.data());
        mf_pad.assign(mf_fft.size(), 0.0);
        mf_spec.assign(mf_fft.bins(), {});
        mf_result.assign(mf_fft.size(), 0.0);
        filt_buf.assign(size_t{kChannelCount} * mf_len, 0.0);

        delays.resize(n_dirs * kChannelCount);
        advances.resize(n_dirs);
        for (size_t d = 0; d < n_dirs; ++d) {
            const auto table = steering_delays(cfg.geometry, cfg.directions[d],
                                               cfg.speed_of_sound, cfg.mf_rate());
            std::copy(table.begin(), table.end(),
                      delays.begin() + static_cast<long>(d * kChannelCount));
            advances[d] = steering_reference_advance(cfg.geometry, cfg.directions[d],
                                                     cfg.speed_of_sound, cfg.mf_rate());
        }

        threads = cfg.processing_threads > 0
                      ? cfg.processing_threads
                      : static_cast<int>(std::min<unsigned>(
                            2, std::max<unsigned>(1, std::thread::hardware_concurrency())));
        threads = static_cast<int>(
            std::min<size_t>(static_cast<size_t>(threads), std::max<size_t>(1, n_dirs)));
        const size_t env_fft_size = next_pow2(mf_len);
        for (int t = 0; t < threads; ++t) {
            scratch.push_back(
                std::make_unique<DirectionScratch>(env_fft_size, mf_len, bins));
        }

        const FirKernel smooth = design_lowpass(cfg.envelope_smoothing.cutoff_hz, cfg.mf_rate(),
                                                cfg.envelope_smoothing.taps);
        const FirKernel postenv =
            design_lowpass(0.45 * cfg.mf_rate() / cfg.post_envelope_decimation, cfg.mf_rate(),
                           decimation_filter_taps(cfg.post_envelope_decimation));
        std::vector<double> composite(smooth.size() + postenv.size() - 1, 0.0);
        for (size_t i = 0; i < smooth.size(); ++i) {
            for (size_t j = 0; j < postenv.size(); ++j) {
                composite[i + j] += smooth.taps[i] * postenv.taps[j];
            }
        }
        smooth_decimate_rev.assign(composite.rbegin(), composite.rend());
    }

    void build_demod_lut() {
        const size_t k = demod_rev.size();
        lut_octets = (7 + k + 7) / 8;
        demod_lut.assign(8 * lut_octets * 256, 0.0);
        for (size_t a = 0; a < 8; ++a) {
            for (size_t t = 0; t < lut_octets; ++t) {
                double* entry = demod_lut.data() + (a * lut_octets + t) * 256;
                for (size_t v = 0; v < 256; ++v) {
                    double acc = 0.0;
                    for (size_t bit = 0; bit < 8; ++bit) {
                        const long idx = static_cast<long>(8 * t + bit) - static_cast<long>(a);
                        if (idx < 0 || idx >= static_cast<long>(k)) continue;
                        const bool one = ((v >> (7 - bit)) & 1) != 0;
                        acc += one ? demod_rev[static_cast<size_t>(idx)]
                                   : -demod_rev[static_cast<size_t>(idx)];
                    }
                    entry[v] = acc;
                }
            }
        }
    }

    template <typename V>
    void ensure(V& v, size_t n) {
        if (v.size() != n) {
            v.resize(n);
            ++alloc_events;
        }
    }

    // Frame-major packed payload -> per-channel packed rows, MSB-first.
    void transpose_bits(std::span<const uint8_t> packed) {
        const size_t full_blocks = frames / 32;
        uint32_t block[32];
        for (size_t b = 0; b < full_blocks; ++b) {
            const uint8_t* src = packed.data() + b * 32 * 4;
            for (int f = 0; f < 32; ++f) {
                block[f] = (uint32_t{src[4 * f]} << 24) | (uint32_t{src[4 * f + 1]} << 16) |
                           (uint32_t{src[4 * f + 2]} << 8) | uint32_t{src[4 * f + 3]};
            }
            transpose32(block);
            for (int c = 0; c < kChannelCount; ++c) {
                uint8_t* dst = bit_rows.data() + static_cast<size_t>(c) * row_stride + b * 4;
                const uint32_t w = block[c];
                dst[0] = static_cast<uint8_t>(w >> 24);
                dst[1] = static_cast<uint8_t>(w >> 16);
                dst[2] = static_cast<uint8_t>(w >> 8);
                dst[3] = static_cast<uint8_t>(w);
            }
        }
        // Tail frames (frame count is a multiple of 8, not necessarily 32).
        for (size_t f = full_blocks * 32; f < frames; ++f) {
            for (int c = 0; c < kChannelCount; ++c) {
                const size_t bit_index = f * kChannelCount + static_cast<size_t>(c);
                const int bit = (packed[bit_index / 8] >> (7 - (bit_index % 8))) & 1;
                uint8_t* row = bit_rows.data() + static_cast<size_t>(c) * row_stride;
                const uint8_t mask = static_cast<uint8_t>(1u << (7 - (f % 8)));
                if (bit) {
                    row[f / 8] |= mask;
                } else {
                    row[f / 8] &= static_cast<uint8_t>(~mask);
                }
            }
        }
    }

    void demodulate_channel(int c) {
        const uint8_t* row = bit_rows.data() + static_cast<size_t>(c) * row_stride;
        double* out = demod_buf.data() + static_cast<size_t>(c) * demod_len;
        const long k = static_cast<long>(demod_rev.size());
        const long d = cfg.demod.decimation;
        const long center = (k - 1) / 2;
        const long total = static_cast<long>(frames);

        const long m_lo = (center + d - 1) / d; // first m with s >= 0
        long m_hi = demod_len == 0 ? 0 : static_cast<long>(demod_len);
        // last m with s + k <= frames
        const long limit = (total - k + center) / d + 1;
        m_hi = std::min(m_hi, std::max(m_lo, limit));

        // Partial filter windows at the capture edges are warm-up, not
        // data: zeroed so the sigma-delta idle pattern cannot smear energy
        // into the first range bins. Echoes from any positive range start
        // far past the warm-up region.
        for (long m = 0; m < std::min<long>(m_lo, static_cast<long>(demod_len)); ++m) {
            out[m] = 0.0;
        }
        for (long m = m_hi; m < static_cast<long>(demod_len); ++m) out[m] = 0.0;

        const size_t octets = lut_octets;
        for (long m = m_lo; m < m_hi; ++m) {
            const long s = m * d - center;
            const size_t base = static_cast<size_t>(s) >> 3;
            const size_t align = static_cast<size_t>(s) & 7;
            const double* table = demod_lut.data() + align * octets * 256;
            const uint8_t* bytes = row + base;
            // Independent accumulator lanes keep the table loads in flight.
            double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
            size_t t = 0;
            for (; t + 4 <= octets; t += 4) {
                a0 += table[(t + 0) * 256 + bytes[t + 0]];
                a1 += table[(t + 1) * 256 + bytes[t + 1]];
                a2 += table[(t + 2) * 256 + bytes[t + 2]];
                a3 += table[(t + 3) * 256 + bytes[t + 3]];
            }
            double acc = (a0 + a1) + (a2 + a3);
            for (; t < octets; ++t) acc += table[t * 256 + bytes[t]];
            out[m] = acc;
        }
    }

    void beamform_into(const double* filtered, size_t dir, double* y) const {
        std::fill(y, y + mf_len, 0.0);
        const int32_t advance = advances[dir];
        const long len = static_cast<long>(mf_len);
        for (int i = 0; i < kChannelCount; ++i) {
            const long shift = delays[dir * kChannelCount + static_cast<size_t>(i)] - advance;
            const double* x = filtered + static_cast<size_t>(i) * mf_len;
            const long n_lo = std::max<long>(0, shift);
            const long n_hi = std::min<long>(len, len + shift);
            const double* src = x + (n_lo - shift);
            for (long n = n_lo; n < n_hi; ++n) y[n] += src[n - n_lo];
        }
        const double scale = 1.0 / kChannelCount;
        for (size_t n = 0; n < mf_len; ++n) y[n] *= scale;
    }

    void envelope_direction(DirectionScratch& s, float* energies_row) const {
        // Hilbert transform via the half spectrum: X -> -i*sgn(f)*X, with DC
        // and Nyquist zeroed; |x + i*H(x)| equals the analytic-signal
        // modulus of the zero-padded block.
        std::copy(s.beam.begin(), s.beam.end(), s.env_pad.begin());
        std::fill(s.env_pad.begin() + static_cast<long>(mf_len), s.env_pad.end(), 0.0);
        s.env_fft.forward(s.env_pad.data(), s.env_spec.data());
        const size_t half = s.env_fft.size() / 2;
        s.env_spec[0] = {0.0, 0.0};
        for (size_t i = 1; i < half; ++i) {
            s.env_spec[i] = {s.env_spec[i].imag(), -s.env_spec[i].real()};
        }
        s.env_spec[half] = {0.0, 0.0};
        s.env_fft.inverse(s.env_spec.data(), s.hilbert.data());
        for (size_t i = 0; i < mf_len; ++i) {
            s.env_row[i] = std::sqrt(s.beam[i] * s.beam[i] + s.hilbert[i] * s.hilbert[i]);
        }

        detail::strided_filter(s.env_row.data(), mf_len, smooth_decimate_rev,
                               -static_cast<long>((smooth_decimate_rev.size() - 1) / 2),
                               cfg.post_envelope_decimation, s.final_row.data(), bins);
        for (size_t k = 0; k < bins; ++k) {
            energies_row[k] = std::max(0.0f, static_cast<float>(s.final_row[k]));
        }
    }

    void run_directions(const double* filtered, float* energies) {
        auto run_block = [&](DirectionScratch& s, size_t lo, size_t hi) {
            for (size_t d = lo; d < hi; ++d) {
                beamform_into(filtered, d, s.beam.data());
                envelope_direction(s, energies + d * bins);
            }
        };
        if (threads <= 1) {
            run_block(*scratch[0], 0, n_dirs);
            return;
        }
        const size_t per = (n_dirs + static_cast<size_t>(threads) - 1) /
                           static_cast<size_t>(threads);
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            const size_t lo = static_cast<size_t>(t) * per;
            const size_t hi = std::min(n_dirs, lo + per);
            if (lo >= hi) break;
            pool.emplace_back([&, t, lo, hi] {
                try {
                    run_block(*scratch[static_cast<size_t>(t)], lo, hi);
                } catch (...) {
                    errors[static_cast<size_t>(t)] = std::current_exception();
                }
            });
        }
        for (auto& thread : pool) thread.join();
        for (const auto& error : errors) {
            if (error) std::rethrow_exception(error);
        }
    }
};

Workspace::Workspace(PipelineConfig cfg) {
    cfg.validate();
    impl_ = std::make_unique<Impl>(std::move(cfg));
}

Workspace::~Workspace() = default;
Workspace::Workspace(Workspace&&) noexcept = default;
Workspace& Workspace::operator=(Workspace&&) noexcept = default;

const PipelineConfig& Workspace::config() const { return impl_->cfg; }
const std::vector<int32_t>& Workspace::delay_table() const { return impl_->delays; }
const std::vector<int32_t>& Workspace::reference_advances() const { return impl_->advances; }
size_t Workspace::allocation_events() const { return impl_->alloc_events; }

AcousticImage Workspace::process(const wire::RawMeasurement& m) {
    Impl& w = *impl_;
    if (m.channels != kChannelCount) {
        throw DecodeError("process: measurement has " + std::to_string(m.channels) +
                          " channels, expected " + std::to_string(kChannelCount));
    }
    if (m.frames != w.frames) {
        throw DecodeError("process: measurement has " + std::to_string(m.frames) +
                          " frames, config expects " + std::to_string(w.frames));
    }
    if (std::abs(m.pdm_rate - w.cfg.pdm_rate) > 1e-6 * w.cfg.pdm_rate) {
        throw DecodeError("process: measurement pdm_rate " + std::to_string(m.pdm_rate) +
                          " does not match config " + std::to_string(w.cfg.pdm_rate));
    }
    const size_t expected_bytes = size_t{kChannelCount} * w.frames / 8;
    if (m.packed.size() != expected_bytes) {
        throw DecodeError("process: payload is " + std::to_string(m.packed.size()) +
                          " bytes, expected " + std::to_string(expected_bytes));
    }

    w.ensure(w.demod_buf, size_t{kChannelCount} * w.demod_len);
    w.ensure(w.mf_buf, size_t{kChannelCount} * w.mf_len);
    w.ensure(w.filt_buf, size_t{kChannelCount} * w.mf_len);

    w.transpose_bits({m.packed.data(), m.packed.size()});

    const long premf_start = -static_cast<long>((w.premf_rev.size() - 1) / 2);
    for (int c = 0; c < kChannelCount; ++c) {
        w.demodulate_channel(c);
        detail::strided_filter(w.demod_buf.data() + static_cast<size_t>(c) * w.demod_len,
                               w.demod_len, w.premf_rev, premf_start, w.cfg.pre_mf_decimation,
                               w.mf_buf.data() + static_cast<size_t>(c) * w.mf_len, w.mf_len);

        std::copy_n(w.mf_buf.data() + static_cast<size_t>(c) * w.mf_len, w.mf_len,
                    w.mf_pad.begin());
        std::fill(w.mf_pad.begin() + static_cast<long>(w.mf_len), w.mf_pad.end(), 0.0);
        w.mf_fft.forward(w.mf_pad.data(), w.mf_spec.data());
        for (size_t i = 0; i < w.mf_spec.size(); ++i) w.mf_spec[i] *= w.ref_spec[i];
        w.mf_fft.inverse(w.mf_spec.data(), w.mf_result.data());
        std::copy_n(w.mf_result.data() + w.ref_len - 1, w.mf_len,
                    w.filt_buf.data() + static_cast<size_t>(c) * w.mf_len);
    }

    AcousticImage image;
    image.sensor_serial = m.sensor_serial;
    image.timestamp_us = m.timestamp_us;
    image.directions = w.cfg.directions;
    image.range_bin_size = w.cfg.range_bin_size();
    image.range_bins = w.bins;
    image.energies.resize(w.n_dirs * w.bins);
    w.run_directions(w.filt_buf.data(), image.energies.data());
    return image;
}

SignalMatrix Workspace::beamform(const SignalMatrix& filtered) const {
    const Impl& w = *impl_;
    if (filtered.channels != kChannelCount) {
        throw ArgumentError("beamform: expected " + std::to_string(kChannelCount) +
                            " channels, got " + std::to_string(filtered.channels));
    }
    if (filtered.samples != w.mf_len) {
        throw ArgumentError("beamform: expected " + std::to_string(w.mf_len) +
                            " samples per channel, got " + std::to_string(filtered.samples));
    }
    SignalMatrix out(w.n_dirs, w.mf_len, filtered.sample_rate);
    for (size_t d = 0; d < w.n_dirs; ++d) {
        w.beamform_into(filtered.data.data(), d, out.channel(d));
    }
    return out;
}

} // namespace sonarnet
