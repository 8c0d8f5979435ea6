#pragma once

#include "sonarnet/dsp.hpp"
#include "sonarnet/fft.hpp"
#include "sonarnet/geometry.hpp"
#include "sonarnet/wire.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace sonarnet {

struct SmoothingConfig {
    double cutoff_hz = 10e3;
    int taps = 127;
};

struct PipelineConfig {
    ArrayGeometry geometry = default_array(42);
    DirectionSet directions = direction_grid(GridKind::horizontal90);
    ChirpParams chirp;                    // sample_rate tracks pdm_rate
    double pdm_rate = 4.5e6;
    DemodConfig demod;                    // 126 kHz, 255 taps, /10
    int pre_mf_decimation = 2;
    int post_envelope_decimation = 10;
    SmoothingConfig envelope_smoothing;
    double speed_of_sound = 343.0;
    double max_range = 5.0; // meters
    // Threads used inside one process() call for the per-direction loop;
    // 0 = auto (min(2, hardware threads)). Results are identical for any
    // value: directions are independent.
    int processing_threads = 0;

    double demod_rate() const { return pdm_rate / demod.decimation; }
    double mf_rate() const { return demod_rate() / pre_mf_decimation; }
    double final_rate() const { return mf_rate() / post_envelope_decimation; }

    // Capture window: round trip to max_range plus the sweep itself,
    // rounded up so every decimation stage divides evenly.
    size_t frames() const;
    size_t demod_samples() const { return frames() / static_cast<size_t>(demod.decimation); }
    size_t mf_samples() const {
        return demod_samples() / static_cast<size_t>(pre_mf_decimation);
    }
    size_t range_bins() const;
    double range_bin_size() const { return speed_of_sound / (2.0 * final_rate()); }

    ChirpParams chirp_at(double sample_rate) const;

    void validate() const; // throws ConfigError
};

PipelineConfig default_pipeline_config(GridKind kind = GridKind::horizontal90);

// JSON pipeline description; every field optional, defaults as above.
// See README for the schema.
PipelineConfig parse_pipeline_config_json(const std::string& text);
PipelineConfig load_pipeline_config_file(const std::string& path);
std::string pipeline_config_to_json(const PipelineConfig& cfg);

// Direction x range energy map for one measurement.
struct AcousticImage {
    uint32_t sensor_serial = 0;
    uint64_t timestamp_us = 0;
    DirectionSet directions;
    double range_bin_size = 0.0; // meters
    size_t range_bins = 0;
    std::vector<float> energies; // directions.size() * range_bins

    float at(size_t direction, size_t bin) const {
        return energies[direction * range_bins + bin];
    }
    double range_for_bin(size_t bin) const { return static_cast<double>(bin) * range_bin_size; }

    // (direction index, range bin) of the largest energy.
    std::pair<size_t, size_t> argmax() const;
};

// AIMG, little-endian: u32 magic 0x41494D47, u16 version 1, u32 serial,
// u64 timestamp_us, u32 directions, u32 range bins, f64 range_bin_size,
// per direction (f32 azimuth, f32 elevation), then row-major f32 energies.
std::vector<uint8_t> image_to_bytes(const AcousticImage& image);
AcousticImage image_from_bytes(std::span<const uint8_t> bytes);
void save_image_file(const AcousticImage& image, const std::string& path);
AcousticImage load_image_file(const std::string& path);

// CSV: direction_index,azimuth_rad,elevation_rad,range_m,energy
void save_image_csv(const AcousticImage& image, std::ostream& out);
void save_image_csv_file(const AcousticImage& image, const std::string& path);

// Preallocated per-worker state: steering tables, FFT plans, the reference
// spectrum and every intermediate buffer. One in-flight process() per
// instance; run one Workspace per worker for parallelism.
class Workspace {
public:
    explicit Workspace(PipelineConfig cfg);
    ~Workspace();

    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;
    Workspace(Workspace&&) noexcept;
    Workspace& operator=(Workspace&&) noexcept;

    const PipelineConfig& config() const;

    // Full chain: unpack -> demodulate -> decimate -> matched filter ->
    // beamform -> envelope -> decimate -> truncate to the range window.
    // All-or-error: a corrupt measurement throws and yields no image.
    AcousticImage process(const wire::RawMeasurement& m);

    // Delay-and-sum over the precomputed steering table: one output channel
    // per direction. Input must be 32 channels at the matched-filter rate.
    SignalMatrix beamform(const SignalMatrix& filtered) const;

    // Steering delays (directions x channels) at the matched-filter rate.
    const std::vector<int32_t>& delay_table() const;
    // Per-direction advance mapping beamformed time back to the array origin.
    const std::vector<int32_t>& reference_advances() const;

    // Buffer (re)allocations performed inside process() after construction.
    size_t allocation_events() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace sonarnet
