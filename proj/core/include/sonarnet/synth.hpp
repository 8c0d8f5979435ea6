#pragma once

#include "sonarnet/dsp.hpp"
#include "sonarnet/geometry.hpp"
#include "sonarnet/pipeline.hpp"
#include "sonarnet/wire.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sonarnet {

struct Reflector {
    double range = 1.0;        // meters, > 0
    double azimuth = 0.0;      // radians
    double elevation = 0.0;    // radians
    double reflectivity = 1.0; // amplitude factor, >= 0
};

struct Scene {
    std::vector<Reflector> reflectors;
    double noise_rms = 0.0;
    uint64_t seed = 0;
};

// Scene description file, JSON:
// {"noise_rms": .., "seed": .., "reflectors":
//   [{"range_m": .., "azimuth_deg": .., "elevation_deg": .., "reflectivity": ..}]}
Scene load_scene_file(const std::string& path);
Scene parse_scene_json(const std::string& text);
std::string scene_to_json(const Scene& scene);
void save_scene_file(const Scene& scene, const std::string& path);

struct CaptureSpec {
    double sample_rate = 4.5e6;
    size_t length = 0;
};

// Far-field echo forward model: per microphone and reflector, the emitted
// chirp scaled by reflectivity/range^2 and delayed by the round trip plus
// the plane-wave arrival offset of that microphone, plus seeded white
// Gaussian noise. The chirp is generated at the capture rate.
SignalMatrix synthesize_scene(const ArrayGeometry& geometry, const ChirpParams& chirp,
                              const Scene& scene, const CaptureSpec& capture,
                              double speed_of_sound);

// First-order sigma-delta loop per channel: b = sign(e + x), e += x - b.
// Inputs outside [-1, 1] are clipped; clipped sample count reported through
// the optional out-parameter.
PdmBitMatrix sigma_delta_modulate(const SignalMatrix& signal, size_t* clipped_samples = nullptr);

// Exact inverse of unpack_pdm's layout (frame-major, MSB-first). Frame
// count must be divisible by 8.
std::vector<uint8_t> pack_pdm(const PdmBitMatrix& bits);

// synthesize_scene at the pdm rate -> sigma_delta_modulate -> pack_pdm,
// wrapped with identification and trigger metadata.
wire::RawMeasurement synthesize_measurement(const PipelineConfig& cfg, const Scene& scene,
                                            uint32_t serial, uint64_t timestamp_us,
                                            uint64_t seq = 0);

} // namespace sonarnet
