// Acceptance suite: one pass/fail line per criterion. Exit code is the
// number of failed criteria. Heavier criteria reuse the CLI's own
// benchmark output where the protocol demands it.

#include "sonarnet/bench.hpp"
#include "sonarnet/detail/bytes.hpp"
#include "sonarnet/dsp.hpp"
#include "sonarnet/errors.hpp"
#include "sonarnet/fft.hpp"
#include "sonarnet/geometry.hpp"
#include "sonarnet/nodes/app.hpp"
#include "sonarnet/nodes/central.hpp"
#include "sonarnet/nodes/sensor.hpp"
#include "sonarnet/nodes/sync.hpp"
#include "sonarnet/pipeline.hpp"
#include "sonarnet/rng.hpp"
#include "sonarnet/synth.hpp"
#include "sonarnet/wire.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace sonarnet;
namespace fs = std::filesystem;
using clk = std::chrono::steady_clock;

namespace {

constexpr double pi = std::numbers::pi;

int g_failures = 0;

void report(int criterion, bool ok, const std::string& what, const std::string& detail) {
    std::printf("%s  criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion, what.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

double seconds_since(clk::time_point t0) {
    return std::chrono::duration<double>(clk::now() - t0).count();
}

// Brute-force linear convolution oracle.
std::vector<double> direct_convolve(std::span<const double> x, std::span<const double> h) {
    std::vector<double> y(x.size() + h.size() - 1, 0.0);
    for (size_t n = 0; n < x.size(); ++n) {
        for (size_t k = 0; k < h.size(); ++k) y[n + k] += x[n] * h[k];
    }
    return y;
}

// Small pipeline for the network criteria; the protocol does not depend on
// the measurement size.
PipelineConfig tiny_config() {
    PipelineConfig cfg = default_pipeline_config();
    cfg.pdm_rate = 1e6;
    cfg.chirp.sample_rate = 1e6;
    cfg.chirp.f_start = 20000.0;
    cfg.chirp.f_end = 8000.0;
    cfg.chirp.duration = 1.5e-3;
    cfg.max_range = 2.0;
    cfg.processing_threads = 1;
    return cfg;
}

// --- criterion 1: convolution oracle ---------------------------------------

void criterion_convolution() {
    const auto t0 = clk::now();
    Rng rng(20240901);
    bool ok = true;
    double worst = 0.0;
    for (int trial = 0; trial < 200 && ok; ++trial) {
        size_t len;
        size_t klen;
        if (trial < 3) {
            len = 65536;
            klen = 1023;
        } else {
            len = 256 + static_cast<size_t>(rng.uniform(0.0, 65536.0 - 256.0));
            klen = 3 + 2 * static_cast<size_t>(rng.uniform(0.0, 510.0));
            klen = std::min(klen, len);
        }
        SignalMatrix x(1, len, 1000.0);
        for (double& v : x.data) v = rng.uniform(-1.0, 1.0);
        std::vector<double> h(klen);
        for (double& v : h) v = rng.uniform(-1.0, 1.0);

        const auto fft_result = fft_convolve(x, {h.data(), h.size()}, false);
        const auto oracle = direct_convolve(x.channel_span(0), {h.data(), h.size()});
        double num = 0.0, den = 0.0;
        for (size_t i = 0; i < oracle.size(); ++i) {
            const double d = fft_result.channel(0)[i] - oracle[i];
            num += d * d;
            den += oracle[i] * oracle[i];
        }
        const double rel = std::sqrt(num / den);
        worst = std::max(worst, rel);
        if (rel >= 1e-9) ok = false;
    }
    const double elapsed = seconds_since(t0);
    std::ostringstream detail;
    detail << "200 cases, worst relative RMS " << worst << ", " << elapsed << " s";
    report(1, ok && elapsed < 30.0, "fft_convolve matches direct convolution within 1e-9",
           detail.str());
}

// --- criterion 2: PDM round trip --------------------------------------------

double tone_roundtrip_snr_db(double tone_hz, double amp) {
    const double pdm_rate = 4.5e6;
    const size_t frames = 100000;
    SignalMatrix x(1, frames, pdm_rate);
    for (size_t i = 0; i < frames; ++i) {
        x.channel(0)[i] = amp * std::sin(2.0 * pi * tone_hz * static_cast<double>(i) / pdm_rate);
    }
    const auto bits = sigma_delta_modulate(x);
    const auto out = pdm_demodulate(bits, DemodConfig{});

    const double fs = out.sample_rate;
    SignalMatrix ref(1, out.samples, fs);
    SignalMatrix err(1, out.samples, fs);
    for (size_t i = 0; i < out.samples; ++i) {
        ref.channel(0)[i] =
            amp * std::sin(2.0 * pi * tone_hz * static_cast<double>(i * 10) / pdm_rate);
        err.channel(0)[i] = out.channel(0)[i] - ref.channel(0)[i];
    }
    const auto band = design_lowpass(44000.0, fs, 255);
    const auto ref_band = fft_convolve(ref, band, true);
    const auto err_band = fft_convolve(err, band, true);
    const size_t guard = 300;
    double ps = 0.0, pn = 0.0;
    for (size_t i = guard; i + guard < out.samples; ++i) {
        ps += ref_band.channel(0)[i] * ref_band.channel(0)[i];
        pn += err_band.channel(0)[i] * err_band.channel(0)[i];
    }
    return 10.0 * std::log10(ps / pn);
}

void criterion_pdm_roundtrip() {
    const auto t0 = clk::now();
    Rng rng(77001);
    double worst = 1e9;
    for (int i = 0; i < 20; ++i) {
        const double f = rng.uniform(8000.0, 36000.0);
        worst = std::min(worst, tone_roundtrip_snr_db(f, 0.7));
    }
    const double elapsed = seconds_since(t0);
    std::ostringstream detail;
    detail << "20 tones in [8, 36] kHz, worst in-band SNR " << worst << " dB, " << elapsed
           << " s";
    report(2, worst >= 40.0 && elapsed < 30.0,
           "sigma-delta modulate/demodulate reaches 40 dB in-band SNR", detail.str());
}

// --- criterion 3: localization oracle ----------------------------------------

void criterion_localization() {
    const auto t0 = clk::now();
    size_t hits = 0, total = 0;
    for (const GridKind kind : {GridKind::horizontal90, GridKind::box1850}) {
        PipelineConfig cfg = default_pipeline_config(kind);
        Workspace ws(cfg);
        const double az_step = kind == GridKind::horizontal90 ? pi / 89 : (pi / 2) / 49;
        const double el_step = kind == GridKind::horizontal90 ? 1.0 : (pi / 2) / 36;
        Rng rng(kind == GridKind::horizontal90 ? 555u : 556u);
        for (int trial = 0; trial < 50; ++trial) {
            const double range = rng.uniform(0.5, 4.0);
            const double az = kind == GridKind::horizontal90 ? rng.uniform(-1.45, 1.45)
                                                             : rng.uniform(-0.72, 0.72);
            const double el =
                kind == GridKind::horizontal90 ? 0.0 : rng.uniform(-0.72, 0.72);
            Scene scene;
            scene.noise_rms = 0.01;
            scene.seed = static_cast<uint64_t>(trial) * 13 + 1;
            scene.reflectors.push_back(
                {range, az, el, rng.uniform(0.3, 0.9) * range * range});

            const auto img = ws.process(synthesize_measurement(cfg, scene, 1, 0, 0));
            const auto [dir, bin] = img.argmax();

            size_t want = 0;
            double best = 1e9;
            for (size_t d = 0; d < cfg.directions.size(); ++d) {
                const double e = std::abs(cfg.directions[d].azimuth - az) +
                                 std::abs(cfg.directions[d].elevation - el);
                if (e < best) {
                    best = e;
                    want = d;
                }
            }
            const long want_bin =
                std::lround(2.0 * range / cfg.speed_of_sound * cfg.final_rate());
            const bool dir_ok =
                std::abs(cfg.directions[dir].azimuth - cfg.directions[want].azimuth) <=
                    az_step + 1e-9 &&
                std::abs(cfg.directions[dir].elevation - cfg.directions[want].elevation) <=
                    el_step + 1e-9;
            const bool bin_ok = std::abs(static_cast<long>(bin) - want_bin) <= 1;
            ++total;
            if (dir_ok && bin_ok) ++hits;
        }
    }
    const double elapsed = seconds_since(t0);
    std::ostringstream detail;
    detail << hits << "/" << total << " scenes within one cell, " << elapsed << " s";
    report(3, hits * 100 >= total * 96 && elapsed < 300.0,
           "single-reflector argmax lands within one (direction, range) cell", detail.str());
}

// --- criterion 4: multi-target -----------------------------------------------

void criterion_multitarget() {
    const auto t0 = clk::now();
    PipelineConfig cfg = default_pipeline_config();
    Workspace ws(cfg);
    int good_seeds = 0;
    for (uint64_t seed = 0; seed < 10; ++seed) {
        Scene scene;
        scene.noise_rms = 0.01;
        scene.seed = seed;
        scene.reflectors.push_back({1.0, -pi / 6, 0.0, 0.7});
        scene.reflectors.push_back({2.0, 40.0 * pi / 180.0, 0.0, 0.7 * 4.0});
        const auto img = ws.process(synthesize_measurement(cfg, scene, 1, 0, seed));

        auto local_peak_near = [&](double az, double range) {
            size_t want_dir = 0;
            double best = 1e9;
            for (size_t d = 0; d < cfg.directions.size(); ++d) {
                const double e = std::abs(cfg.directions[d].azimuth - az);
                if (e < best) {
                    best = e;
                    want_dir = d;
                }
            }
            const long want_bin =
                std::lround(2.0 * range / cfg.speed_of_sound * cfg.final_rate());
            float best_v = -1.0f;
            long at_dir = -99, at_bin = -99;
            for (long d = static_cast<long>(want_dir) - 4;
                 d <= static_cast<long>(want_dir) + 4; ++d) {
                for (long b = want_bin - 4; b <= want_bin + 4; ++b) {
                    if (d < 0 || b < 0 || d >= static_cast<long>(img.directions.size()) ||
                        b >= static_cast<long>(img.range_bins)) {
                        continue;
                    }
                    const float v = img.at(static_cast<size_t>(d), static_cast<size_t>(b));
                    if (v > best_v) {
                        best_v = v;
                        at_dir = d;
                        at_bin = b;
                    }
                }
            }
            return std::abs(at_dir - static_cast<long>(want_dir)) <= 1 &&
                   std::abs(at_bin - want_bin) <= 1;
        };
        if (local_peak_near(-pi / 6, 1.0) && local_peak_near(40.0 * pi / 180.0, 2.0)) {
            ++good_seeds;
        }
    }
    std::ostringstream detail;
    detail << good_seeds << "/10 seeds, " << seconds_since(t0) << " s";
    report(4, good_seeds == 10, "two reflectors resolve to their cells on every seed",
           detail.str());
}

// --- criterion 5: worker transparency ------------------------------------------

void criterion_worker_transparency() {
    const auto t0 = clk::now();
    const auto cfg = tiny_config();
    std::vector<wire::RawMeasurement> measurements;
    for (uint64_t seq = 0; seq < 8; ++seq) {
        Scene scene;
        scene.noise_rms = 0.01;
        scene.seed = seq + 40;
        scene.reflectors.push_back({1.2, 0.2, 0.0, 0.9});
        measurements.push_back(synthesize_measurement(cfg, scene, 1, 1000 + seq, seq));
    }

    auto run_with_workers = [&](int workers, const fs::path& dir) {
        fs::remove_all(dir);
        fs::create_directories(dir);
        nodes::CentralConfig central_cfg;
        central_cfg.mode = nodes::CentralConfig::Mode::processing;
        central_cfg.pipeline = cfg;
        central_cfg.workers = workers;
        nodes::CentralNode central(central_cfg);
        central.start();

        nodes::AppClient app({"127.0.0.1", central.port()});
        if (app.subscribe().has_value()) return false;
        auto socket = nodes::TcpSocket::connect({"127.0.0.1", central.port()});
        for (const auto& m : measurements) {
            const auto frame = wire::measurement_frame(m);
            if (!socket.send_all({frame.data(), frame.size()})) return false;
        }
        size_t received = 0;
        const auto deadline = clk::now() + std::chrono::seconds(30);
        while (received < measurements.size() && clk::now() < deadline) {
            const auto event = app.next(250);
            if (!event || event->kind != nodes::AppClient::Event::Kind::image) continue;
            char name[32];
            std::snprintf(name, sizeof(name), "%012llu.aimg",
                          static_cast<unsigned long long>(event->seq));
            save_image_file(event->image, (dir / name).string());
            ++received;
        }
        app.close();
        socket.close();
        central.stop();
        return received == measurements.size();
    };

    const auto dir1 = fs::temp_directory_path() / "sonarnet_accept_k1";
    const auto dir8 = fs::temp_directory_path() / "sonarnet_accept_k8";
    bool ok = run_with_workers(1, dir1) && run_with_workers(8, dir8);
    size_t compared = 0;
    if (ok) {
        for (const auto& entry : fs::directory_iterator(dir1)) {
            const auto other = dir8 / entry.path().filename();
            if (!fs::exists(other)) {
                ok = false;
                break;
            }
            if (detail::read_file(entry.path().string()) !=
                detail::read_file(other.string())) {
                ok = false;
                break;
            }
            ++compared;
        }
        ok = ok && compared == measurements.size();
    }
    fs::remove_all(dir1);
    fs::remove_all(dir8);
    std::ostringstream detail_text;
    detail_text << compared << " image files byte-compared, " << seconds_since(t0) << " s";
    report(5, ok, "K=1 and K=8 central produce bit-identical image files", detail_text.str());
}

// --- criterion 6: network conservation ------------------------------------------

void criterion_conservation() {
    const auto t0 = clk::now();
    const auto cfg = tiny_config();
    bool processing_ok = false;
    bool storage_ok = false;

    // processing mode: 3 sensors x 100 -> exactly 300 images, per-sensor FIFO
    {
        nodes::CentralConfig central_cfg;
        central_cfg.mode = nodes::CentralConfig::Mode::processing;
        central_cfg.pipeline = cfg;
        central_cfg.workers = 2;
        nodes::CentralNode central(central_cfg);
        central.start();

        nodes::AppClient app({"127.0.0.1", central.port()});
        const auto refused = app.subscribe();

        nodes::TriggerScheduler scheduler(150.0);
        std::vector<std::unique_ptr<nodes::SensorNode>> sensors;
        std::vector<std::thread> threads;
        for (int s = 0; s < 3; ++s) {
            nodes::SensorConfig sensor_cfg;
            sensor_cfg.serial = static_cast<uint32_t>(s + 1);
            sensor_cfg.central = {"127.0.0.1", central.port()};
            sensor_cfg.scene.reflectors.push_back({1.0, 0.1, 0.0, 0.8});
            sensor_cfg.pipeline = cfg;
            sensor_cfg.max_measurements = 100;
            sensors.push_back(
                std::make_unique<nodes::SensorNode>(sensor_cfg, scheduler.subscribe()));
        }
        for (auto& sensor : sensors) {
            threads.emplace_back([&sensor] { sensor->run(); });
        }
        scheduler.start();

        std::map<uint32_t, std::vector<uint64_t>> delivered;
        size_t total = 0;
        const auto deadline = clk::now() + std::chrono::seconds(120);
        while (total < 300 && clk::now() < deadline) {
            const auto event = app.next(250);
            if (!event || event->kind != nodes::AppClient::Event::Kind::image) continue;
            delivered[event->serial].push_back(event->seq);
            ++total;
        }
        const auto no_extra = app.next(300);
        for (auto& t : threads) t.join();
        scheduler.stop();

        uint64_t drops = 0;
        for (const auto& sensor : sensors) drops += sensor->stats().dropped;
        app.close();
        central.stop();

        bool fifo = delivered.size() == 3;
        for (const auto& [serial, seqs] : delivered) {
            if (seqs.size() != 100) fifo = false;
            for (size_t i = 1; i < seqs.size(); ++i) {
                if (seqs[i] <= seqs[i - 1]) fifo = false;
            }
        }
        processing_ok =
            !refused.has_value() && total == 300 && !no_extra.has_value() && fifo &&
            drops == 0;
    }

    // storage mode: the same load -> 300 files and a complete manifest
    const auto dir = fs::temp_directory_path() / "sonarnet_accept_storage";
    {
        fs::remove_all(dir);
        nodes::CentralConfig central_cfg;
        central_cfg.mode = nodes::CentralConfig::Mode::storage;
        central_cfg.storage_dir = dir.string();
        central_cfg.workers = 2;
        nodes::CentralNode central(central_cfg);
        central.start();

        nodes::TriggerScheduler scheduler(150.0);
        std::vector<std::unique_ptr<nodes::SensorNode>> sensors;
        std::vector<std::thread> threads;
        for (int s = 0; s < 3; ++s) {
            nodes::SensorConfig sensor_cfg;
            sensor_cfg.serial = static_cast<uint32_t>(s + 1);
            sensor_cfg.central = {"127.0.0.1", central.port()};
            sensor_cfg.scene.reflectors.push_back({1.0, 0.1, 0.0, 0.8});
            sensor_cfg.pipeline = cfg;
            sensor_cfg.max_measurements = 100;
            sensors.push_back(
                std::make_unique<nodes::SensorNode>(sensor_cfg, scheduler.subscribe()));
        }
        for (auto& sensor : sensors) {
            threads.emplace_back([&sensor] { sensor->run(); });
        }
        scheduler.start();
        for (auto& t : threads) t.join();
        scheduler.stop();

        const auto deadline = clk::now() + std::chrono::seconds(60);
        while (central.stats().files_stored < 300 && clk::now() < deadline) {
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
        central.stop();

        size_t files = 0;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.path().extension() == ".pdm") ++files;
        }
        size_t manifest_lines = 0;
        std::ifstream manifest(dir / "manifest.tsv");
        std::string line;
        while (std::getline(manifest, line)) {
            if (!line.empty()) ++manifest_lines;
        }
        storage_ok = files == 300 && manifest_lines == 300;
        fs::remove_all(dir);
    }

    std::ostringstream detail;
    detail << "processing " << (processing_ok ? "ok" : "FAILED") << ", storage "
           << (storage_ok ? "ok" : "FAILED") << ", " << seconds_since(t0) << " s";
    report(6, processing_ok && storage_ok,
           "3 sensors x 100 measurements conserved in both central modes", detail.str());
}

// --- criterion 7: protocol conformance -------------------------------------------

void criterion_protocol() {
    const auto t0 = clk::now();

    wire::Packet subscribe;
    subscribe.msg_type = wire::MsgType::subscribe;
    const auto frame = wire::encode_packet(subscribe);
    const std::vector<uint8_t> golden{
        0x49, 0x54, 0x52, 0x45, 0x01, 0x00, 0x03, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
        0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
        0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x9C, 0x7E, 0x9E, 0xEC,
    };
    const bool golden_ok = frame == golden;

    // fuzz: 10^6 random bytes interleaved with 100 valid frames
    Rng rng(424242);
    std::vector<wire::Packet> sent;
    std::vector<uint8_t> stream;
    stream.reserve(1200000);
    const size_t noise_per_gap = 1000000 / 101;
    for (int i = 0; i < 100; ++i) {
        for (size_t j = 0; j < noise_per_gap; ++j) {
            stream.push_back(static_cast<uint8_t>(rng.next_u64()));
        }
        wire::Packet p;
        p.msg_type = static_cast<wire::MsgType>(1 + rng.next_u64() % 5);
        p.sensor_serial = static_cast<uint32_t>(rng.next_u64());
        p.timestamp_us = rng.next_u64();
        p.seq = static_cast<uint64_t>(i);
        p.payload.resize(rng.next_u64() % 200);
        for (auto& b : p.payload) b = static_cast<uint8_t>(rng.next_u64());
        sent.push_back(p);
        const auto bytes = wire::encode_packet(p);
        stream.insert(stream.end(), bytes.begin(), bytes.end());
    }
    for (size_t j = 0; j < noise_per_gap; ++j) {
        stream.push_back(static_cast<uint8_t>(rng.next_u64()));
    }

    wire::PacketDecoder decoder;
    std::vector<wire::Packet> got;
    size_t at = 0;
    while (at < stream.size()) {
        const size_t n = std::min<size_t>(4096, stream.size() - at);
        decoder.feed({stream.data() + at, n});
        at += n;
        while (true) {
            auto event = decoder.next();
            if (event.status == wire::PacketDecoder::Status::need_more) break;
            if (event.status == wire::PacketDecoder::Status::packet) {
                got.push_back(std::move(event.packet));
            }
        }
    }
    bool fuzz_ok = got.size() == sent.size();
    if (fuzz_ok) {
        for (size_t i = 0; i < sent.size(); ++i) {
            if (!(got[i] == sent[i])) fuzz_ok = false;
        }
    }

    std::ostringstream detail;
    detail << "golden " << (golden_ok ? "ok" : "MISMATCH") << ", fuzz recovered "
           << got.size() << "/100, " << seconds_since(t0) << " s";
    report(7, golden_ok && fuzz_ok, "golden frame matches and the fuzzed decoder recovers all",
           detail.str());
}

// --- criteria 8 and 9a: benchmark protocol via the CLI ---------------------------

struct BenchRow {
    size_t directions = 0;
    size_t n = 0;
    double mean_ms = 0.0;
    double std_ms = 0.0;
};

std::map<std::string, BenchRow> run_cli_benchmark(bool& cli_ok, std::string& table_text) {
    const auto csv_path = fs::temp_directory_path() / "sonarnet_accept_bench.csv";
    const auto table_path = fs::temp_directory_path() / "sonarnet_accept_bench.txt";
    const std::string command = std::string(SONARNET_CLI_PATH) +
                                " bench pipeline --n 100 --out " + csv_path.string() + " > " +
                                table_path.string();
    cli_ok = std::system(command.c_str()) == 0;

    std::map<std::string, BenchRow> rows;
    if (cli_ok) {
        std::ifstream csv(csv_path);
        std::string line;
        std::getline(csv, line); // header
        while (std::getline(csv, line)) {
            std::stringstream fields(line);
            std::string name, cell;
            BenchRow row;
            std::getline(fields, name, ',');
            std::getline(fields, cell, ',');
            row.directions = std::stoul(cell);
            std::getline(fields, cell, ',');
            row.n = std::stoul(cell);
            std::getline(fields, cell, ',');
            row.mean_ms = std::stod(cell);
            std::getline(fields, cell, ',');
            row.std_ms = std::stod(cell);
            rows[name] = row;
        }
        std::ifstream table(table_path);
        std::ostringstream head;
        head << table.rdbuf();
        table_text = head.str();
    }
    fs::remove(csv_path);
    fs::remove(table_path);
    return rows;
}

} // namespace

int main() {
    std::printf("sonarnet acceptance suite\n");
    const auto t0 = clk::now();

    criterion_convolution();
    criterion_pdm_roundtrip();
    criterion_localization();
    criterion_multitarget();
    criterion_worker_transparency();
    criterion_conservation();
    criterion_protocol();

    // criterion 8: benchmark protocol reproduction through the CLI
    bool cli_ok = false;
    std::string table_text;
    const auto rows = run_cli_benchmark(cli_ok, table_text);
    {
        const bool shape_ok =
            cli_ok && rows.size() == 3 && rows.count("horizontal90") &&
            rows.count("box1850") && rows.count("hemisphere3000") &&
            rows.at("horizontal90").directions == 90 &&
            rows.at("box1850").directions == 1850 &&
            rows.at("hemisphere3000").directions == 3000 &&
            rows.at("horizontal90").n == 100 && rows.at("box1850").n == 100 &&
            rows.at("hemisphere3000").n == 100 &&
            table_text.find("90 directions") != std::string::npos &&
            table_text.find("1850 directions") != std::string::npos &&
            table_text.find("3000 directions") != std::string::npos;
        const bool order_ok =
            shape_ok && rows.at("hemisphere3000").mean_ms > rows.at("box1850").mean_ms &&
            rows.at("box1850").mean_ms > rows.at("horizontal90").mean_ms;
        std::ostringstream detail;
        if (shape_ok) {
            detail << "mean ms: 90->" << rows.at("horizontal90").mean_ms << ", 1850->"
                   << rows.at("box1850").mean_ms << ", 3000->"
                   << rows.at("hemisphere3000").mean_ms;
        } else {
            detail << "CLI or report shape failure";
        }
        report(8, shape_ok && order_ok,
               "bench pipeline emits the three-configuration report with increasing cost",
               detail.str());
    }

    // criterion 9: real-time sufficiency at desk scale
    {
        const bool mean_ok =
            cli_ok && rows.count("horizontal90") && rows.at("horizontal90").mean_ms < 50.0;
        bench::SoakConfig soak_cfg;
        soak_cfg.sensors = 3;
        soak_cfg.rate_hz = 5.0;
        soak_cfg.duration_s = 10.0;
        soak_cfg.workers = 4;
        const auto soak = bench::run_soak(soak_cfg);
        const bool soak_ok = soak.total_drops() == 0 && soak.delivered_errors == 0 &&
                             soak.delivered_images == soak.synthesized &&
                             soak.synthesized >= 3 * 5 * 9;
        std::ostringstream detail;
        detail << "horizontal90 mean "
               << (rows.count("horizontal90") ? rows.at("horizontal90").mean_ms : -1.0)
               << " ms; soak " << soak.delivered_images << " images, drops "
               << soak.total_drops() << ", p99 " << soak.latency_p99_ms << " ms";
        report(9, mean_ok && soak_ok,
               "sustains 20 Hz single-sensor and the 3-sensor 5 Hz soak without drops",
               detail.str());
    }

    // criterion 10: direction grid counts and constraints
    {
        bool ok = true;
        const auto h90 = direction_grid(GridKind::horizontal90);
        ok = ok && h90.size() == 90;
        for (const auto& d : h90.directions) {
            if (d.elevation != 0.0 || std::abs(d.azimuth) > pi / 2 + 1e-12) ok = false;
        }
        const auto box = direction_grid(GridKind::box1850);
        ok = ok && box.size() == 1850;
        for (const auto& d : box.directions) {
            if (std::abs(d.azimuth) > pi / 4 + 1e-12 ||
                std::abs(d.elevation) > pi / 4 + 1e-12) {
                ok = false;
            }
        }
        const auto hemi = direction_grid(GridKind::hemisphere3000);
        ok = ok && hemi.size() == 3000;
        for (const auto& d : hemi.directions) {
            if (d.unit().x < 0.0) ok = false;
        }
        report(10, ok, "grids count 90 / 1850 / 3000 with the stated angular constraints",
               "horizontal90, box1850, hemisphere3000");
    }

    std::printf("%d criterion(s) failed; total runtime %.1f s\n", g_failures,
                seconds_since(t0));
    return g_failures;
}
