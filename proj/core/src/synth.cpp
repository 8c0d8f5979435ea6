#include "sonarnet/synth.hpp"

#include "sonarnet/errors.hpp"
#include "sonarnet/rng.hpp"

#include <algorithm>
#include <cmath>

namespace sonarnet {

SignalMatrix synthesize_scene(const ArrayGeometry& geometry, const ChirpParams& chirp,
                              const Scene& scene, const CaptureSpec& capture,
                              double speed_of_sound) {
    if (capture.length == 0) throw ArgumentError("synthesize_scene: empty capture window");
    if (speed_of_sound <= 0.0) throw ArgumentError("synthesize_scene: speed_of_sound <= 0");
    if (scene.noise_rms < 0.0) throw ArgumentError("synthesize_scene: noise_rms < 0");

    ChirpParams at_capture = chirp;
    at_capture.sample_rate = capture.sample_rate;
    const SignalMatrix pulse = generate_chirp(at_capture);
    const double* ref = pulse.channel(0);
    const size_t ref_len = pulse.samples;

    SignalMatrix out(kChannelCount, capture.length, capture.sample_rate);

    for (size_t k = 0; k < scene.reflectors.size(); ++k) {
        const Reflector& r = scene.reflectors[k];
        if (!(r.range > 0.0)) {
            throw ArgumentError("reflector " + std::to_string(k) + ": range must be > 0");
        }
        if (!(r.reflectivity >= 0.0) || !std::isfinite(r.reflectivity)) {
            throw ArgumentError("reflector " + std::to_string(k) +
                                ": reflectivity must be finite and >= 0");
        }
        const double amplitude = r.reflectivity / (r.range * r.range);
        const Vec3 u = Direction(r.azimuth, r.elevation).unit();
        const double round_trip = 2.0 * r.range / speed_of_sound;
        for (int c = 0; c < kChannelCount; ++c) {
            // Plane-wave arrival offset: microphones facing the reflector
            // hear it earlier.
            const double arrival = round_trip - dot(geometry.position(c), u) / speed_of_sound;
            const long onset = std::lround(arrival * capture.sample_rate);
            if (onset + static_cast<long>(ref_len) > static_cast<long>(capture.length)) {
                throw ArgumentError("reflector " + std::to_string(k) + " at " +
                                    std::to_string(r.range) +
                                    " m: echo ends past the capture window");
            }
            double* dst = out.channel(static_cast<size_t>(c));
            const long lo = std::max<long>(0, onset);
            for (long i = lo; i < onset + static_cast<long>(ref_len); ++i) {
                dst[i] += amplitude * ref[i - onset];
            }
        }
    }

    if (scene.noise_rms > 0.0) {
        Rng rng(scene.seed);
        for (double& v : out.data) v += scene.noise_rms * rng.gaussian();
    }
    return out;
}

PdmBitMatrix sigma_delta_modulate(const SignalMatrix& signal, size_t* clipped_samples) {
    if (signal.channels == 0 || signal.samples == 0) {
        throw ArgumentError("sigma_delta_modulate: empty signal");
    }
    PdmBitMatrix bits;
    bits.channels = static_cast<int>(signal.channels);
    bits.frames = signal.samples;
    bits.pdm_rate = signal.sample_rate;
    bits.bits.resize(signal.channels * signal.samples);

    size_t clipped = 0;
    for (size_t c = 0; c < signal.channels; ++c) {
        const double* x = signal.channel(c);
        int8_t* b = bits.bits.data() + c * signal.samples;
        double integrator = 0.0;
        for (size_t n = 0; n < signal.samples; ++n) {
            double v = x[n];
            if (v > 1.0) {
                v = 1.0;
                ++clipped;
            } else if (v < -1.0) {
                v = -1.0;
                ++clipped;
            }
            const int8_t bit = (integrator + v >= 0.0) ? int8_t{1} : int8_t{-1};
            integrator += v - bit;
            b[n] = bit;
        }
    }
    if (clipped_samples != nullptr) *clipped_samples = clipped;
    return bits;
}

std::vector<uint8_t> pack_pdm(const PdmBitMatrix& bits) {
    if (bits.frames % 8 != 0) {
        throw ArgumentError("pack_pdm: frame count " + std::to_string(bits.frames) +
                            " not divisible by 8");
    }
    const size_t channels = static_cast<size_t>(bits.channels);
    const size_t total_bits = channels * bits.frames;
    std::vector<uint8_t> out(total_bits / 8, 0);
    // Frame-major, MSB-first: exact inverse of unpack_pdm.
    size_t bit_index = 0;
    for (size_t f = 0; f < bits.frames; ++f) {
        for (size_t c = 0; c < channels; ++c, ++bit_index) {
            if (bits.bits[c * bits.frames + f] > 0) {
                out[bit_index / 8] |= static_cast<uint8_t>(1u << (7 - (bit_index % 8)));
            }
        }
    }
    return out;
}

wire::RawMeasurement synthesize_measurement(const PipelineConfig& cfg, const Scene& scene,
                                            uint32_t serial, uint64_t timestamp_us,
                                            uint64_t seq) {
    cfg.validate();
    const CaptureSpec capture{cfg.pdm_rate, cfg.frames()};
    const SignalMatrix echoes = synthesize_scene(cfg.geometry, cfg.chirp_at(cfg.pdm_rate),
                                                 scene, capture, cfg.speed_of_sound);
    const PdmBitMatrix bits = sigma_delta_modulate(echoes);

    wire::RawMeasurement m;
    m.sensor_serial = serial;
    m.timestamp_us = timestamp_us;
    m.seq = seq;
    m.channels = kChannelCount;
    m.frames = capture.length;
    m.pdm_rate = cfg.pdm_rate;
    m.packed = pack_pdm(bits);
    return m;
}

} // namespace sonarnet
