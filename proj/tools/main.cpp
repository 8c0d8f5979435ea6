// sonarnet command line: sensor-network emulation, offline processing and
// benchmarking around the imaging-sonar pipeline.
//
// Exit codes: 0 ok, 1 configuration error, 2 I/O error, 3 protocol error.

#include "sonarnet/bench.hpp"
#include "sonarnet/detail/bytes.hpp"
#include "sonarnet/errors.hpp"
#include "sonarnet/nodes/app.hpp"
#include "sonarnet/nodes/central.hpp"
#include "sonarnet/nodes/log.hpp"
#include "sonarnet/nodes/sensor.hpp"
#include "sonarnet/pipeline.hpp"
#include "sonarnet/synth.hpp"
#include "sonarnet/wire.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>

namespace {

std::atomic<bool> g_interrupted{false};

void handle_signal(int) { g_interrupted.store(true); }

sonarnet::PipelineConfig load_config_or_default(const std::string& path) {
    if (path.empty()) return sonarnet::default_pipeline_config();
    return sonarnet::load_pipeline_config_file(path);
}

int run_central(const std::string& mode, uint16_t port, int workers,
                const std::string& config_path, const std::string& out_dir,
                size_t queue_capacity) {
    sonarnet::nodes::CentralConfig cfg;
    if (mode == "storage") {
        cfg.mode = sonarnet::nodes::CentralConfig::Mode::storage;
    } else if (mode == "processing") {
        cfg.mode = sonarnet::nodes::CentralConfig::Mode::processing;
    } else {
        throw sonarnet::ConfigError("central: mode must be storage or processing");
    }
    cfg.port = port;
    cfg.workers = workers;
    cfg.pipeline = load_config_or_default(config_path);
    cfg.storage_dir = out_dir;
    cfg.input_queue_capacity = queue_capacity;
    cfg.output_queue_capacity = queue_capacity;

    sonarnet::nodes::CentralNode node(cfg);
    node.start();
    std::printf("central: %s mode, port %u, %d workers\n", mode.c_str(), node.port(), workers);
    while (!g_interrupted.load()) {
        std::this_thread::sleep_for(std::chrono::milliseconds(200));
    }
    node.stop();
    const auto stats = node.stats();
    std::printf("central: received %llu measurements, dispatched %llu images, "
                "%llu errors, stored %llu files, %llu malformed packets\n",
                static_cast<unsigned long long>(stats.measurements),
                static_cast<unsigned long long>(stats.images_dispatched),
                static_cast<unsigned long long>(stats.errors_dispatched),
                static_cast<unsigned long long>(stats.files_stored),
                static_cast<unsigned long long>(stats.malformed));
    return 0;
}

int run_sensor(uint32_t serial, const std::string& central, const std::string& scene_path,
               double rate, const std::string& config_path, uint64_t count) {
    sonarnet::nodes::SensorConfig cfg;
    cfg.serial = serial;
    cfg.central = sonarnet::nodes::parse_endpoint(central);
    cfg.scene = scene_path.empty() ? sonarnet::Scene{} : sonarnet::load_scene_file(scene_path);
    cfg.pipeline = load_config_or_default(config_path);
    cfg.trigger_rate_hz = rate;
    cfg.max_measurements = count;

    sonarnet::nodes::SensorNode node(cfg);
    std::thread watchdog([&node] {
        while (!g_interrupted.load()) {
            std::this_thread::sleep_for(std::chrono::milliseconds(100));
        }
        node.stop();
    });
    node.run();
    g_interrupted.store(true);
    watchdog.join();
    const auto stats = node.stats();
    std::printf("sensor %u: %llu synthesized, %llu sent, %llu dropped, %llu reconnects\n",
                serial, static_cast<unsigned long long>(stats.synthesized),
                static_cast<unsigned long long>(stats.sent),
                static_cast<unsigned long long>(stats.dropped),
                static_cast<unsigned long long>(stats.reconnects));
    return 0;
}

int run_app(const std::string& central, const std::vector<uint32_t>& serials,
            const std::string& dump_dir, bool csv, uint64_t count) {
    sonarnet::nodes::AppClient client(sonarnet::nodes::parse_endpoint(central), serials);
    if (auto refused = client.subscribe()) {
        std::fprintf(stderr, "app: central refused subscription: %s\n", refused->c_str());
        return 3;
    }
    if (!dump_dir.empty()) std::filesystem::create_directories(dump_dir);

    uint64_t received = 0;
    while (!g_interrupted.load() && (count == 0 || received < count)) {
        std::optional<sonarnet::nodes::AppClient::Event> event;
        try {
            event = client.next(500);
        } catch (const sonarnet::IoError&) {
            break;
        }
        if (!event) continue;
        if (event->kind == sonarnet::nodes::AppClient::Event::Kind::error) {
            std::fprintf(stderr, "app: sensor %u seq %llu failed at the central node: %s\n",
                         event->serial, static_cast<unsigned long long>(event->seq),
                         event->message.c_str());
            continue;
        }
        ++received;
        const auto peak = event->image.argmax();
        std::printf("image serial=%u seq=%llu peak dir=%zu range=%.3f m\n", event->serial,
                    static_cast<unsigned long long>(event->seq), peak.first,
                    event->image.range_for_bin(peak.second));
        if (!dump_dir.empty()) {
            char name[64];
            std::snprintf(name, sizeof(name), "%08x_%012llu", event->serial,
                          static_cast<unsigned long long>(event->seq));
            const auto base = std::filesystem::path(dump_dir) / name;
            sonarnet::save_image_file(event->image, base.string() + ".aimg");
            if (csv) sonarnet::save_image_csv_file(event->image, base.string() + ".csv");
        }
    }
    std::printf("app: received %llu images, %llu error reports\n",
                static_cast<unsigned long long>(client.images_received()),
                static_cast<unsigned long long>(client.errors_received()));
    return 0;
}

int run_process(const std::string& in_path, const std::string& config_path,
                const std::string& out_path, const std::string& csv_path) {
    const auto cfg = load_config_or_default(config_path);
    const auto bytes = sonarnet::detail::read_file(in_path);
    const auto measurement =
        sonarnet::wire::decode_raw_measurement({bytes.data(), bytes.size()});
    sonarnet::Workspace ws(cfg);
    const auto image = ws.process(measurement);
    sonarnet::save_image_file(image, out_path);
    if (!csv_path.empty()) sonarnet::save_image_csv_file(image, csv_path);
    const auto peak = image.argmax();
    std::printf("processed seq %llu from sensor %u: %zu directions x %zu bins, "
                "peak at dir %zu (az %.1f deg), range %.3f m\n",
                static_cast<unsigned long long>(measurement.seq), measurement.sensor_serial,
                image.directions.size(), image.range_bins, peak.first,
                image.directions[peak.first].azimuth * 180.0 / 3.14159265358979,
                image.range_for_bin(peak.second));
    return 0;
}

int run_synth(const std::string& scene_path, const std::string& config_path,
              const std::string& out_path, uint32_t serial, uint64_t seq,
              uint64_t timestamp_us) {
    const auto cfg = load_config_or_default(config_path);
    const auto scene =
        scene_path.empty() ? sonarnet::Scene{} : sonarnet::load_scene_file(scene_path);
    if (timestamp_us == 0) timestamp_us = sonarnet::nodes::wall_clock_us();
    const auto measurement =
        sonarnet::synthesize_measurement(cfg, scene, serial, timestamp_us, seq);
    const auto bytes = sonarnet::wire::encode_raw_measurement(measurement);
    sonarnet::detail::write_file(out_path, {bytes.data(), bytes.size()});
    std::printf("synthesized %llu frames x %u channels (%zu bytes) -> %s\n",
                static_cast<unsigned long long>(measurement.frames), measurement.channels,
                bytes.size(), out_path.c_str());
    return 0;
}

int run_bench_pipeline(size_t n, const std::string& out_path) {
    const auto report = sonarnet::bench::run_benchmark_default(n);
    std::printf("%s", sonarnet::bench::report_table(report).c_str());
    if (!out_path.empty()) {
        sonarnet::bench::save_report_csv(report, out_path);
        std::printf("report written to %s\n", out_path.c_str());
    }
    return 0;
}

int run_bench_soak(int sensors, double rate, double duration, int workers,
                   const std::string& grid) {
    sonarnet::bench::SoakConfig cfg;
    cfg.sensors = sensors;
    cfg.rate_hz = rate;
    cfg.duration_s = duration;
    cfg.workers = workers;
    cfg.grid = sonarnet::grid_kind_from_string(grid);
    const auto report = sonarnet::bench::run_soak(cfg);
    std::printf("%s", sonarnet::bench::soak_summary(report).c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);

    CLI::App app{"sonarnet: in-air imaging sonar sensor network"};
    app.require_subcommand(1);

    // central
    auto* central = app.add_subcommand("central", "run the central node");
    std::string central_mode = "processing";
    uint16_t central_port = 17511;
    int central_workers = 2;
    std::string central_config;
    std::string central_out = "measurements";
    size_t central_queue = 64;
    central->add_option("--mode", central_mode, "storage|processing");
    central->add_option("--port", central_port, "listen port");
    central->add_option("--workers", central_workers, "worker count");
    central->add_option("--config", central_config, "pipeline config JSON");
    central->add_option("--out", central_out, "storage directory (storage mode)");
    central->add_option("--queue", central_queue, "queue capacity");

    // sensor
    auto* sensor = app.add_subcommand("sensor", "run a sensor-node emulator");
    uint32_t sensor_serial = 1;
    std::string sensor_central = "127.0.0.1:17511";
    std::string sensor_scene;
    double sensor_rate = 20.0;
    std::string sensor_config;
    uint64_t sensor_count = 0;
    sensor->add_option("--serial", sensor_serial, "sensor serial number");
    sensor->add_option("--central", sensor_central, "central node HOST:PORT");
    sensor->add_option("--scene", sensor_scene, "scene JSON file");
    sensor->add_option("--rate", sensor_rate, "trigger rate, Hz");
    sensor->add_option("--config", sensor_config, "pipeline config JSON");
    sensor->add_option("--count", sensor_count, "stop after N measurements (0 = run)");

    // app
    auto* app_node = app.add_subcommand("app", "subscribe to processed images");
    std::string app_central = "127.0.0.1:17511";
    std::vector<uint32_t> app_serials;
    std::string app_dump;
    bool app_csv = false;
    uint64_t app_count = 0;
    app_node->add_option("--central", app_central, "central node HOST:PORT");
    app_node->add_option("--serials", app_serials, "only these sensor serials")
        ->delimiter(',');
    app_node->add_option("--dump-dir", app_dump, "write received images here");
    app_node->add_flag("--csv", app_csv, "also write CSV next to each image");
    app_node->add_option("--count", app_count, "exit after N images (0 = run)");

    // process
    auto* process = app.add_subcommand("process", "process one stored measurement");
    std::string process_in;
    std::string process_config;
    std::string process_out = "image.aimg";
    std::string process_csv;
    process->add_option("--in", process_in, "measurement .pdm file")->required();
    process->add_option("--config", process_config, "pipeline config JSON");
    process->add_option("--out", process_out, "output image file");
    process->add_option("--csv", process_csv, "also write CSV here");

    // synth
    auto* synth = app.add_subcommand("synth", "synthesize one measurement");
    std::string synth_scene;
    std::string synth_config;
    std::string synth_out = "measurement.pdm";
    uint32_t synth_serial = 1;
    uint64_t synth_seq = 0;
    uint64_t synth_timestamp = 0;
    synth->add_option("--scene", synth_scene, "scene JSON file");
    synth->add_option("--config", synth_config, "pipeline config JSON");
    synth->add_option("--out", synth_out, "output measurement file");
    synth->add_option("--serial", synth_serial, "sensor serial number");
    synth->add_option("--seq", synth_seq, "measurement index");
    synth->add_option("--timestamp", synth_timestamp, "timestamp, us since epoch (0 = now)");

    // bench
    auto* bench = app.add_subcommand("bench", "benchmarks");
    bench->require_subcommand(1);
    auto* bench_pipeline = bench->add_subcommand("pipeline", "time process() per config");
    size_t bench_n = 100;
    std::string bench_out;
    bench_pipeline->add_option("--n", bench_n, "measurements per configuration");
    bench_pipeline->add_option("--out", bench_out, "CSV report path");
    auto* bench_soak = bench->add_subcommand("soak", "full-stack loopback throughput");
    int soak_sensors = 3;
    double soak_rate = 5.0;
    double soak_duration = 30.0;
    int soak_workers = 4;
    std::string soak_grid = "horizontal90";
    bench_soak->add_option("--sensors", soak_sensors, "emulated sensor count");
    bench_soak->add_option("--rate", soak_rate, "trigger rate, Hz");
    bench_soak->add_option("--duration", soak_duration, "run time, seconds");
    bench_soak->add_option("--workers", soak_workers, "central worker count");
    bench_soak->add_option("--grid", soak_grid, "direction grid kind");

    CLI11_PARSE(app, argc, argv);

    try {
        if (central->parsed()) {
            return run_central(central_mode, central_port, central_workers, central_config,
                               central_out, central_queue);
        }
        if (sensor->parsed()) {
            return run_sensor(sensor_serial, sensor_central, sensor_scene, sensor_rate,
                              sensor_config, sensor_count);
        }
        if (app_node->parsed()) {
            return run_app(app_central, app_serials, app_dump, app_csv, app_count);
        }
        if (process->parsed()) {
            return run_process(process_in, process_config, process_out, process_csv);
        }
        if (synth->parsed()) {
            return run_synth(synth_scene, synth_config, synth_out, synth_serial, synth_seq,
                             synth_timestamp);
        }
        if (bench->parsed()) {
            if (bench_pipeline->parsed()) return run_bench_pipeline(bench_n, bench_out);
            if (bench_soak->parsed()) {
                return run_bench_soak(soak_sensors, soak_rate, soak_duration, soak_workers,
                                      soak_grid);
            }
        }
    } catch (const sonarnet::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 1;
    } catch (const sonarnet::ArgumentError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 1;
    } catch (const sonarnet::IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 2;
    } catch (const sonarnet::DecodeError& e) {
        std::fprintf(stderr, "protocol error: %s\n", e.what());
        return 3;
    } catch (const sonarnet::ProtocolError& e) {
        std::fprintf(stderr, "protocol error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
