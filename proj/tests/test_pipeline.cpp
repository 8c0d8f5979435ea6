#include "sonarnet/pipeline.hpp"

#include "sonarnet/errors.hpp"
#include "sonarnet/rng.hpp"
#include "sonarnet/synth.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>

using namespace sonarnet;

namespace {

constexpr double pi = std::numbers::pi;

// Smaller window, same structure: keeps unit tests quick.
PipelineConfig small_config(GridKind kind = GridKind::horizontal90) {
    PipelineConfig cfg = default_pipeline_config(kind);
    cfg.max_range = 1.5;
    return cfg;
}

wire::RawMeasurement one_reflector(const PipelineConfig& cfg, double range, double az,
                                   double el, double received_amplitude, uint64_t seed,
                                   double noise = 0.01) {
    Scene scene;
    scene.noise_rms = noise;
    scene.seed = seed;
    scene.reflectors.push_back({range, az, el, received_amplitude * range * range});
    return synthesize_measurement(cfg, scene, 1, 1000, 0);
}

size_t nearest_direction(const DirectionSet& set, double az, double el) {
    size_t best = 0;
    double best_err = 1e9;
    for (size_t d = 0; d < set.size(); ++d) {
        const double e = std::abs(set[d].azimuth - az) + std::abs(set[d].elevation - el);
        if (e < best_err) {
            best_err = e;
            best = d;
        }
    }
    return best;
}

long expected_bin(const PipelineConfig& cfg, double range) {
    return std::lround(2.0 * range / cfg.speed_of_sound * cfg.final_rate());
}

} // namespace

// --- PipelineConfig ----------------------------------------------------------

TEST_CASE("config derives divisible frame counts and sane rates") {
    const PipelineConfig cfg = default_pipeline_config();
    cfg.validate();
    CHECK(cfg.demod_rate() == doctest::Approx(450000.0));
    CHECK(cfg.mf_rate() == doctest::Approx(225000.0));
    CHECK(cfg.final_rate() == doctest::Approx(22500.0));
    CHECK(cfg.frames() % 8 == 0);
    CHECK(cfg.frames() % static_cast<size_t>(cfg.demod.decimation) == 0);
    CHECK(cfg.demod_samples() % static_cast<size_t>(cfg.pre_mf_decimation) == 0);
    CHECK(cfg.mf_samples() % static_cast<size_t>(cfg.post_envelope_decimation) == 0);
    // window covers the round trip plus the sweep
    const double window_s = static_cast<double>(cfg.frames()) / cfg.pdm_rate;
    CHECK(window_s >= 2.0 * cfg.max_range / cfg.speed_of_sound + cfg.chirp.duration);
    CHECK(cfg.range_bins() >= 1);
    CHECK(cfg.range_bin_size() == doctest::Approx(343.0 / 45000.0));
}

TEST_CASE("config validation rejects nonsense") {
    PipelineConfig cfg = default_pipeline_config();
    cfg.max_range = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = default_pipeline_config();
    cfg.demod.taps = 256; // even
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = default_pipeline_config();
    cfg.chirp.f_start = 200000.0; // above matched-filter Nyquist (112.5 kHz)
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = default_pipeline_config();
    cfg.directions.directions.clear();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("pipeline config JSON round trip") {
    PipelineConfig cfg = small_config(GridKind::box1850);
    cfg.demod.cutoff_hz = 120000.0;
    cfg.processing_threads = 1;
    const auto text = pipeline_config_to_json(cfg);
    const auto back = parse_pipeline_config_json(text);
    CHECK(back.directions.kind == GridKind::box1850);
    CHECK(back.demod.cutoff_hz == doctest::Approx(120000.0));
    CHECK(back.max_range == doctest::Approx(cfg.max_range));
    CHECK(back.frames() == cfg.frames());
    CHECK(back.processing_threads == 1);

    CHECK_THROWS_AS(parse_pipeline_config_json("{bad"), ConfigError);
    CHECK_THROWS_AS(parse_pipeline_config_json(R"({"directions":{"kind":"bogus"}})"),
                    ConfigError);
}

// --- Workspace ----------------------------------------------------------------

TEST_CASE("workspace precomputes one delay row per direction") {
    const PipelineConfig cfg = small_config();
    Workspace ws(cfg);
    CHECK(ws.delay_table().size() == 90 * 32);
    CHECK(ws.reference_advances().size() == 90);

    Workspace ws2(cfg);
    CHECK(ws.delay_table() == ws2.delay_table());
    CHECK(ws.reference_advances() == ws2.reference_advances());
}

TEST_CASE("workspace can be moved to another owner and still process") {
    PipelineConfig cfg = small_config();
    cfg.max_range = 0.8;
    cfg.chirp.duration = 1e-3;
    Workspace original(cfg);
    const auto m = one_reflector(cfg, 0.5, 0.0, 0.0, 0.5, 2);
    const auto before = original.process(m);

    Workspace moved = std::move(original);
    const auto after = moved.process(m);
    CHECK(before.energies == after.energies);
}

TEST_CASE("workspace rejects configs with an empty range window") {
    PipelineConfig cfg = small_config();
    cfg.max_range = 0.001; // derived range-bin count is zero
    CHECK_THROWS_AS(Workspace{cfg}, ConfigError);
}

TEST_CASE("workspace processes 100 measurements without reallocating") {
    PipelineConfig cfg = small_config();
    cfg.max_range = 0.8;
    cfg.chirp.duration = 1e-3;
    Workspace ws(cfg);
    Scene scene;
    scene.reflectors.push_back({0.5, 0.0, 0.0, 0.2});
    const auto m = synthesize_measurement(cfg, scene, 1, 0, 0);
    for (int i = 0; i < 100; ++i) {
        (void)ws.process(m);
    }
    CHECK(ws.allocation_events() == 0);
}

// --- beamform -------------------------------------------------------------------

TEST_CASE("beamform averages identical channels back to the common channel") {
    PipelineConfig cfg = small_config();
    Workspace ws(cfg);
    const size_t boresight = nearest_direction(cfg.directions, 0.0, 0.0);
    bool zero_delays = ws.reference_advances()[boresight] == 0;
    for (int i = 0; i < kChannelCount; ++i) {
        if (ws.delay_table()[boresight * kChannelCount + static_cast<size_t>(i)] != 0) {
            zero_delays = false;
        }
    }

    Rng rng(3);
    SignalMatrix filtered(kChannelCount, cfg.mf_samples(), cfg.mf_rate());
    for (size_t n = 0; n < filtered.samples; ++n) {
        const double v = rng.uniform(-1.0, 1.0);
        for (size_t c = 0; c < kChannelCount; ++c) filtered.channel(c)[n] = v;
    }
    const auto beams = ws.beamform(filtered);
    REQUIRE(beams.channels == 90);
    if (zero_delays) {
        for (size_t n = 0; n < filtered.samples; ++n) {
            CHECK(beams.channel(boresight)[n] ==
                  doctest::Approx(filtered.channel(0)[n]).epsilon(1e-12));
        }
    }

    // Explicit all-zero-delay case: a planar array steered to boresight.
    std::array<Vec3, kChannelCount> flat{};
    int placed = 0;
    for (int gy = 0; gy < 16 && placed < kChannelCount; ++gy) {
        for (int gz = 0; gz < 16 && placed < kChannelCount; ++gz) {
            const Vec3 p{0.0, -0.033 + 0.0044 * gy, -0.033 + 0.0044 * gz};
            if (std::sqrt(p.y * p.y + p.z * p.z) > 0.046) continue;
            flat[static_cast<size_t>(placed++)] = p;
        }
    }
    REQUIRE(placed == kChannelCount);
    PipelineConfig planar = cfg;
    planar.geometry = ArrayGeometry::from_positions(flat);
    Workspace flat_ws(planar);
    const size_t bore2 = nearest_direction(planar.directions, 0.0, 0.0);
    const auto beams2 = flat_ws.beamform(filtered);
    for (size_t n = 0; n < filtered.samples; ++n) {
        CHECK(beams2.channel(bore2)[n] ==
              doctest::Approx(filtered.channel(0)[n]).epsilon(1e-12));
    }
}

TEST_CASE("beamform: a plane wave built from the steering delays lands on its direction") {
    PipelineConfig cfg = small_config();
    Workspace ws(cfg);
    const auto ref = generate_chirp(cfg.chirp_at(cfg.mf_rate()));

    for (size_t target : {size_t{7}, size_t{44}, size_t{71}}) {
        SignalMatrix filtered(kChannelCount, cfg.mf_samples(), cfg.mf_rate());
        const size_t place = 600;
        for (int c = 0; c < kChannelCount; ++c) {
            const auto delay =
                ws.delay_table()[target * kChannelCount + static_cast<size_t>(c)];
            // advance each channel by its steering delay
            const long start = static_cast<long>(place) - delay;
            for (size_t k = 0; k < ref.samples; ++k) {
                filtered.channel(static_cast<size_t>(c))[static_cast<size_t>(start) + k] =
                    ref.channel(0)[k];
            }
        }
        const auto beams = ws.beamform(filtered);
        size_t best_dir = 0;
        double best_energy = -1.0;
        for (size_t d = 0; d < beams.channels; ++d) {
            double e = 0.0;
            const double* y = beams.channel(d);
            for (size_t n = 0; n < beams.samples; ++n) e += y[n] * y[n];
            if (e > best_energy) {
                best_energy = e;
                best_dir = d;
            }
        }
        CHECK(best_dir == target);
    }
}

TEST_CASE("beamform is linear") {
    PipelineConfig cfg = small_config();
    Workspace ws(cfg);
    Rng rng(5);
    SignalMatrix x(kChannelCount, cfg.mf_samples(), cfg.mf_rate());
    for (double& v : x.data) v = rng.uniform(-1.0, 1.0);
    SignalMatrix scaled = x;
    for (double& v : scaled.data) v *= 2.5;

    const auto y1 = ws.beamform(x);
    const auto y2 = ws.beamform(scaled);
    for (size_t i = 0; i < y1.data.size(); ++i) {
        CHECK(y2.data[i] == doctest::Approx(2.5 * y1.data[i]).epsilon(1e-12));
    }
}

TEST_CASE("beamform validates input shape") {
    PipelineConfig cfg = small_config();
    Workspace ws(cfg);
    SignalMatrix wrong_channels(8, cfg.mf_samples(), cfg.mf_rate());
    CHECK_THROWS_AS(ws.beamform(wrong_channels), ArgumentError);
    SignalMatrix wrong_len(kChannelCount, 100, cfg.mf_rate());
    CHECK_THROWS_AS(ws.beamform(wrong_len), ArgumentError);
}

// --- process: localization oracles ---------------------------------------------

TEST_CASE("process localizes a single reflector to the right cell") {
    const PipelineConfig cfg = small_config();
    Workspace ws(cfg);
    const auto m = one_reflector(cfg, 1.0, 0.0, 0.0, 0.6, 11);
    const auto img = ws.process(m);

    CHECK(img.sensor_serial == 1);
    CHECK(img.timestamp_us == 1000);
    CHECK(img.range_bins == cfg.range_bins());
    CHECK(img.energies.size() == 90 * cfg.range_bins());

    const auto [dir, bin] = img.argmax();
    const auto want_dir = nearest_direction(cfg.directions, 0.0, 0.0);
    const auto want_bin = expected_bin(cfg, 1.0);
    CHECK(std::abs(static_cast<long>(dir) - static_cast<long>(want_dir)) <= 1);
    CHECK(std::abs(static_cast<long>(bin) - want_bin) <= 1);
}

TEST_CASE("process: off-axis reflectors land within one cell, both grids") {
    for (const GridKind kind : {GridKind::horizontal90, GridKind::box1850}) {
        PipelineConfig cfg = small_config(kind);
        Workspace ws(cfg);
        Rng rng(17);
        for (int trial = 0; trial < 3; ++trial) {
            const double range = rng.uniform(0.6, 1.3);
            const double max_az = kind == GridKind::horizontal90 ? 1.4 : 0.7;
            const double az = rng.uniform(-max_az, max_az);
            const double el = kind == GridKind::horizontal90 ? 0.0 : rng.uniform(-0.7, 0.7);
            const auto m = one_reflector(cfg, range, az, el, rng.uniform(0.4, 0.8),
                                         static_cast<uint64_t>(trial) * 31 + 5);
            const auto img = ws.process(m);
            const auto [dir, bin] = img.argmax();
            const auto want_dir = nearest_direction(cfg.directions, az, el);

            const auto& got = cfg.directions[dir];
            const auto& want = cfg.directions[want_dir];
            // within one grid step in each angle
            CHECK(std::abs(got.azimuth - want.azimuth) <= pi / 2 / 49 + 1e-9);
            CHECK(std::abs(got.elevation - want.elevation) <= pi / 2 / 36 + 1e-9);
            CHECK(std::abs(static_cast<long>(bin) - expected_bin(cfg, range)) <= 1);
        }
    }
}

TEST_CASE("process: silence stays at least a million times below a real echo") {
    PipelineConfig cfg = small_config();
    Workspace ws(cfg);
    const Scene silent;
    const auto img_silent = ws.process(synthesize_measurement(cfg, silent, 1, 0, 0));
    float floor_peak = 0.0f;
    for (float v : img_silent.energies) floor_peak = std::max(floor_peak, v);

    const auto img_echo = ws.process(one_reflector(cfg, 1.0, 0.0, 0.0, 1.0, 0, 0.0));
    float echo_peak = 0.0f;
    for (float v : img_echo.energies) echo_peak = std::max(echo_peak, v);

    CHECK(echo_peak > 0.0f);
    CHECK(floor_peak <= 1e-6f * echo_peak);
}

TEST_CASE("process: two reflectors produce two local maxima at their cells") {
    PipelineConfig cfg = default_pipeline_config(); // needs the 5 m window
    Workspace ws(cfg);
    Scene scene;
    scene.noise_rms = 0.01;
    scene.seed = 21;
    scene.reflectors.push_back({1.0, -pi / 6, 0.0, 0.7 * 1.0});
    scene.reflectors.push_back({2.0, 40.0 * pi / 180.0, 0.0, 0.7 * 4.0});
    const auto img = ws.process(synthesize_measurement(cfg, scene, 1, 0, 0));

    const auto check_peak = [&](double az, double range) {
        const size_t want_dir = nearest_direction(cfg.directions, az, 0.0);
        const long want_bin = expected_bin(cfg, range);
        float best = -1.0f;
        long best_dir = -99, best_bin = -99;
        // find the local peak within a +-4 cell neighborhood
        for (long d = static_cast<long>(want_dir) - 4; d <= static_cast<long>(want_dir) + 4;
             ++d) {
            for (long b = want_bin - 4; b <= want_bin + 4; ++b) {
                if (d < 0 || b < 0 || d >= static_cast<long>(img.directions.size()) ||
                    b >= static_cast<long>(img.range_bins)) {
                    continue;
                }
                const float v = img.at(static_cast<size_t>(d), static_cast<size_t>(b));
                if (v > best) {
                    best = v;
                    best_dir = d;
                    best_bin = b;
                }
            }
        }
        CHECK(std::abs(best_dir - static_cast<long>(want_dir)) <= 1);
        CHECK(std::abs(best_bin - want_bin) <= 1);
    };
    check_peak(-pi / 6, 1.0);
    check_peak(40.0 * pi / 180.0, 2.0);
}

TEST_CASE("process: range calibration at 0.5, 1, 2 and 4 meters") {
    PipelineConfig cfg = default_pipeline_config();
    Workspace ws(cfg);
    for (double range : {0.5, 1.0, 2.0, 4.0}) {
        const auto img = ws.process(one_reflector(cfg, range, 0.0, 0.0, 0.5, 33, 0.005));
        const auto [dir, bin] = img.argmax();
        CHECK(std::abs(static_cast<long>(bin) - expected_bin(cfg, range)) <= 1);
    }
}

TEST_CASE("process: peak energy falls strictly with range") {
    PipelineConfig cfg = default_pipeline_config();
    Workspace ws(cfg);
    double previous = 1e30;
    for (double range : {0.5, 1.0, 2.0, 4.0}) {
        Scene scene;
        scene.reflectors.push_back({range, 0.0, 0.0, 0.5}); // fixed reflectivity
        const auto img = ws.process(synthesize_measurement(cfg, scene, 1, 0, 0));
        float peak = 0.0f;
        for (float v : img.energies) peak = std::max(peak, v);
        CHECK(peak < previous);
        previous = peak;
    }
}

TEST_CASE("process: argmax is invariant under received-amplitude scaling") {
    PipelineConfig cfg = small_config();
    Workspace ws(cfg);
    const auto weak = ws.process(one_reflector(cfg, 1.0, 0.3, 0.0, 0.3, 3, 0.0));
    const auto strong = ws.process(one_reflector(cfg, 1.0, 0.3, 0.0, 0.6, 3, 0.0));
    CHECK(weak.argmax() == strong.argmax());
    float weak_peak = 0.0f, strong_peak = 0.0f;
    for (float v : weak.energies) weak_peak = std::max(weak_peak, v);
    for (float v : strong.energies) strong_peak = std::max(strong_peak, v);
    // the modulator is the only nonlinearity; the ratio stays close to 2
    CHECK(strong_peak / weak_peak == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("process: argmax moves monotonically with the reflector azimuth") {
    PipelineConfig cfg = small_config();
    Workspace ws(cfg);
    long previous = -1;
    for (int k = 40; k <= 44; ++k) {
        const double az = cfg.directions[static_cast<size_t>(k)].azimuth;
        const auto img = ws.process(one_reflector(cfg, 1.0, az, 0.0, 0.6, 55, 0.005));
        const auto [dir, bin] = img.argmax();
        CHECK(static_cast<long>(dir) > previous);
        previous = static_cast<long>(dir);
    }
}

TEST_CASE("process is deterministic and independent of the thread count") {
    PipelineConfig cfg = small_config();
    const auto m = one_reflector(cfg, 1.0, 0.2, 0.0, 0.5, 77);

    cfg.processing_threads = 1;
    Workspace single(cfg);
    cfg.processing_threads = 2;
    Workspace dual(cfg);

    const auto img_a = single.process(m);
    const auto img_b = single.process(m);
    const auto img_c = dual.process(m);
    CHECK(img_a.energies == img_b.energies);
    CHECK(img_a.energies == img_c.energies);
    CHECK(image_to_bytes(img_a) == image_to_bytes(img_c));
}

TEST_CASE("process equals the staged public operations") {
    PipelineConfig cfg = small_config();
    cfg.max_range = 0.9;
    Workspace ws(cfg);
    const auto m = one_reflector(cfg, 0.6, 0.15, 0.0, 0.5, 13);
    const auto img = ws.process(m);

    // Staged route: unpack -> demodulate -> zero the filter warm-up edges
    // (as process does) -> decimate -> matched filter -> beamform ->
    // envelope with smoothing -> decimate -> truncate.
    const auto bits = unpack_pdm({m.packed.data(), m.packed.size()}, kChannelCount,
                                 m.frames, m.pdm_rate);
    auto demod = pdm_demodulate(bits, cfg.demod);
    const long center = (cfg.demod.taps - 1) / 2;
    const long head = (center + cfg.demod.decimation - 1) / cfg.demod.decimation;
    const long tail_begin = (static_cast<long>(m.frames) - cfg.demod.taps + center) /
                                cfg.demod.decimation + 1;
    for (size_t c = 0; c < demod.channels; ++c) {
        for (long i = 0; i < head; ++i) demod.channel(c)[i] = 0.0;
        for (long i = tail_begin; i < static_cast<long>(demod.samples); ++i) {
            demod.channel(c)[i] = 0.0;
        }
    }
    const auto dec = decimate(demod, cfg.pre_mf_decimation);
    const auto ref = generate_chirp(cfg.chirp_at(cfg.mf_rate()));
    const auto mf = matched_filter(dec, ref.channel_span(0));
    const auto beams = ws.beamform(mf);
    const auto smoothing = design_lowpass(cfg.envelope_smoothing.cutoff_hz, cfg.mf_rate(),
                                          cfg.envelope_smoothing.taps);
    const auto env = envelope(beams, &smoothing);
    const auto fin = decimate(env, cfg.post_envelope_decimation);

    REQUIRE(fin.channels == img.directions.size());
    REQUIRE(fin.samples >= img.range_bins);

    // process() fuses smoothing and the anti-alias decimator into one
    // kernel; within that kernel's half-width of the array edge the
    // zero-padding boundary differs from the two-pass cascade. The interior
    // must agree to float precision, the edge bins to noise scale.
    const size_t edge_bins =
        (cfg.envelope_smoothing.taps + decimation_filter_taps(cfg.post_envelope_decimation)) /
            2 / static_cast<size_t>(cfg.post_envelope_decimation) +
        2;
    float peak = 0.0f;
    for (float v : img.energies) peak = std::max(peak, v);

    double num = 0.0, den = 0.0;
    double worst_edge = 0.0;
    for (size_t d = 0; d < img.directions.size(); ++d) {
        for (size_t b = 0; b < img.range_bins; ++b) {
            const double staged = std::max(0.0, fin.channel(d)[b]);
            const double diff = static_cast<double>(img.at(d, b)) - staged;
            if (b < edge_bins || b + edge_bins >= img.range_bins) {
                worst_edge = std::max(worst_edge, std::abs(diff));
            } else {
                num += diff * diff;
                den += staged * staged;
            }
        }
    }
    CHECK(std::sqrt(num / den) < 1e-6);
    CHECK(worst_edge <= 1e-3 * peak);
}

TEST_CASE("process rejects mismatched measurements all-or-error") {
    PipelineConfig cfg = small_config();
    Workspace ws(cfg);
    Scene scene;
    auto m = synthesize_measurement(cfg, scene, 1, 0, 0);

    auto bad = m;
    bad.channels = 16;
    CHECK_THROWS_AS(ws.process(bad), DecodeError);

    bad = m;
    bad.frames = m.frames - 8;
    CHECK_THROWS_AS(ws.process(bad), DecodeError);

    bad = m;
    bad.packed.pop_back();
    CHECK_THROWS_AS(ws.process(bad), DecodeError);

    bad = m;
    bad.pdm_rate = 1e6;
    CHECK_THROWS_AS(ws.process(bad), DecodeError);
}

// --- AcousticImage serialization -------------------------------------------------

TEST_CASE("acoustic image round trips through AIMG bytes and files") {
    PipelineConfig cfg = small_config();
    Workspace ws(cfg);
    const auto img = ws.process(one_reflector(cfg, 0.8, -0.4, 0.0, 0.5, 8));

    const auto bytes = image_to_bytes(img);
    const auto back = image_from_bytes({bytes.data(), bytes.size()});
    CHECK(back.sensor_serial == img.sensor_serial);
    CHECK(back.timestamp_us == img.timestamp_us);
    CHECK(back.range_bins == img.range_bins);
    CHECK(back.range_bin_size == img.range_bin_size);
    CHECK(back.energies == img.energies);
    REQUIRE(back.directions.size() == img.directions.size());
    for (size_t d = 0; d < img.directions.size(); ++d) {
        CHECK(static_cast<float>(back.directions[d].azimuth) ==
              static_cast<float>(img.directions[d].azimuth));
    }

    const auto path = std::filesystem::temp_directory_path() / "sonarnet_test.aimg";
    save_image_file(img, path.string());
    const auto loaded = load_image_file(path.string());
    CHECK(loaded.energies == img.energies);
    std::filesystem::remove(path);

    // encoding is deterministic
    CHECK(image_to_bytes(back) == bytes);
}

TEST_CASE("AIMG decode rejects corrupt headers") {
    std::vector<uint8_t> junk(64, 0xAB);
    CHECK_THROWS_AS(image_from_bytes({junk.data(), junk.size()}), DecodeError);
    std::vector<uint8_t> short_buf{0x47, 0x4D};
    CHECK_THROWS_AS(image_from_bytes({short_buf.data(), short_buf.size()}), DecodeError);
}

TEST_CASE("image CSV export shape") {
    PipelineConfig cfg = small_config();
    cfg.max_range = 0.6;
    cfg.chirp.duration = 1e-3;
    Workspace ws(cfg);
    const Scene empty;
    const auto img = ws.process(synthesize_measurement(cfg, empty, 1, 0, 0));
    std::stringstream buf;
    save_image_csv(img, buf);
    std::string header;
    std::getline(buf, header);
    CHECK(header == "direction_index,azimuth_rad,elevation_rad,range_m,energy");
    size_t lines = 0;
    std::string line;
    while (std::getline(buf, line)) ++lines;
    CHECK(lines == img.directions.size() * img.range_bins);
}

TEST_CASE("image argmax and range_for_bin") {
    AcousticImage img;
    img.range_bins = 3;
    img.range_bin_size = 0.01;
    img.directions = direction_grid(GridKind::horizontal90);
    img.directions.directions.resize(2);
    img.energies = {0.0f, 1.0f, 0.5f, 2.0f, 0.1f, 0.0f};
    const auto [dir, bin] = img.argmax();
    CHECK(dir == 1);
    CHECK(bin == 0);
    CHECK(img.range_for_bin(2) == doctest::Approx(0.02));
}
