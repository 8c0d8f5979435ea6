#include "sonarnet/bench.hpp"

#include "sonarnet/errors.hpp"
#include "sonarnet/nodes/app.hpp"
#include "sonarnet/nodes/central.hpp"
#include "sonarnet/nodes/log.hpp"
#include "sonarnet/nodes/sensor.hpp"
#include "sonarnet/nodes/sync.hpp"
#include "sonarnet/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

namespace sonarnet::bench {

namespace {

std::string iso_timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

double percentile(std::vector<double>& sorted, double p) {
    if (sorted.empty()) return 0.0;
    const double idx = p * static_cast<double>(sorted.size() - 1);
    const size_t lo = static_cast<size_t>(idx);
    const size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = idx - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

} // namespace

std::string hardware_description() {
    std::string model = "unknown CPU";
    std::ifstream cpuinfo("/proc/cpuinfo");
    std::string line;
    while (std::getline(cpuinfo, line)) {
        if (line.rfind("model name", 0) == 0) {
            const auto colon = line.find(':');
            if (colon != std::string::npos) {
                model = line.substr(colon + 1);
                const auto first = model.find_first_not_of(' ');
                if (first != std::string::npos) model = model.substr(first);
            }
            break;
        }
    }
    return model + ", " + std::to_string(std::thread::hardware_concurrency()) + " threads";
}

BenchReport run_benchmark(std::span<const GridKind> kinds, size_t n, const Scene& scene) {
    if (n < 1) throw ConfigError("benchmark: n must be >= 1");
    BenchReport report;
    report.hardware = hardware_description();
    report.workers = 1;
    report.timestamp = iso_timestamp();

    for (const GridKind kind : kinds) {
        const PipelineConfig cfg = default_pipeline_config(kind);
        Workspace ws(cfg); // excluded from timing
        const auto measurement =
            synthesize_measurement(cfg, scene, 1, nodes::wall_clock_us(), 0);

        (void)ws.process(measurement); // warm-up, untimed

        std::vector<double> durations_ms;
        durations_ms.reserve(n);
        for (size_t i = 0; i < n; ++i) {
            const auto t0 = std::chrono::steady_clock::now();
            (void)ws.process(measurement);
            const auto t1 = std::chrono::steady_clock::now();
            durations_ms.push_back(
                std::chrono::duration<double, std::milli>(t1 - t0).count());
        }

        ConfigTiming row;
        row.name = to_string(kind);
        row.direction_count = cfg.directions.size();
        row.n = n;
        double sum = 0.0;
        row.min_ms = durations_ms.front();
        row.max_ms = durations_ms.front();
        for (double d : durations_ms) {
            sum += d;
            row.min_ms = std::min(row.min_ms, d);
            row.max_ms = std::max(row.max_ms, d);
        }
        row.mean_ms = sum / static_cast<double>(n);
        double var = 0.0;
        for (double d : durations_ms) var += (d - row.mean_ms) * (d - row.mean_ms);
        row.std_ms = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;
        report.rows.push_back(row);
        log::info("bench: ", row.name, " mean ", row.mean_ms, " ms (std ", row.std_ms, ")");
    }
    return report;
}

BenchReport run_benchmark_default(size_t n) {
    const GridKind kinds[] = {GridKind::horizontal90, GridKind::box1850,
                              GridKind::hemisphere3000};
    Scene scene;
    scene.reflectors.push_back({1.5, 0.2, 0.0, 0.8});
    scene.reflectors.push_back({3.0, -0.4, 0.1, 0.5});
    scene.noise_rms = 0.01;
    scene.seed = 7;
    return run_benchmark(kinds, n, scene);
}

std::string report_table(const BenchReport& report) {
    std::ostringstream out;
    out << "Computing time per measurement, mean (std), milliseconds; n="
        << (report.rows.empty() ? 0 : report.rows.front().n) << "\n\n";
    out << "platform";
    for (const auto& row : report.rows) {
        out << '\t' << row.direction_count << " directions";
    }
    out << '\n' << report.hardware;
    char cell[64];
    for (const auto& row : report.rows) {
        std::snprintf(cell, sizeof(cell), "\t%.2f (%.2f)", row.mean_ms, row.std_ms);
        out << cell;
    }
    out << '\n';
    return out.str();
}

std::string report_csv(const BenchReport& report) {
    std::ostringstream out;
    out << "configuration,directions,n,mean_ms,std_ms,min_ms,max_ms,hardware,timestamp\n";
    for (const auto& row : report.rows) {
        out << row.name << ',' << row.direction_count << ',' << row.n << ',' << row.mean_ms
            << ',' << row.std_ms << ',' << row.min_ms << ',' << row.max_ms << ",\""
            << report.hardware << "\"," << report.timestamp << '\n';
    }
    return out.str();
}

void save_report_csv(const BenchReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot create report file: " + path);
    out << report_csv(report);
    if (!out.good()) throw IoError("failed writing report file: " + path);
}

SoakReport run_soak(const SoakConfig& cfg) {
    if (cfg.sensors < 1) throw ConfigError("soak: sensors must be >= 1");
    if (cfg.rate_hz <= 0.0 || cfg.duration_s <= 0.0) {
        throw ConfigError("soak: rate and duration must be > 0");
    }

    Scene scene = cfg.scene;
    if (scene.reflectors.empty() && scene.noise_rms == 0.0) {
        scene.reflectors.push_back({2.0, 0.0, 0.0, 0.9});
    }
    const PipelineConfig pipeline = default_pipeline_config(cfg.grid);

    nodes::CentralConfig central_cfg;
    central_cfg.mode = nodes::CentralConfig::Mode::processing;
    central_cfg.port = 0;
    central_cfg.workers = cfg.workers;
    central_cfg.pipeline = pipeline;
    central_cfg.input_queue_capacity = cfg.queue_capacity;
    central_cfg.output_queue_capacity = cfg.queue_capacity;
    nodes::CentralNode central(central_cfg);
    central.start();

    nodes::TriggerScheduler scheduler(cfg.rate_hz);
    std::vector<std::unique_ptr<nodes::SensorNode>> sensors;
    std::vector<std::thread> sensor_threads;
    for (int s = 0; s < cfg.sensors; ++s) {
        nodes::SensorConfig sensor_cfg;
        sensor_cfg.serial = static_cast<uint32_t>(s + 1);
        sensor_cfg.central = {"127.0.0.1", central.port()};
        sensor_cfg.scene = scene;
        sensor_cfg.pipeline = pipeline;
        sensors.push_back(
            std::make_unique<nodes::SensorNode>(sensor_cfg, scheduler.subscribe()));
    }

    nodes::AppClient app({"127.0.0.1", central.port()});
    if (auto refused = app.subscribe()) {
        central.stop();
        throw ProtocolError("soak: subscribe refused: " + *refused);
    }

    std::vector<double> latencies_ms;
    std::atomic<bool> collecting{true};
    std::atomic<uint64_t> delivered_errors{0};
    std::thread collector([&] {
        while (collecting.load()) {
            auto event = app.next(200);
            if (!event) continue;
            if (event->kind == nodes::AppClient::Event::Kind::image) {
                const uint64_t now = nodes::wall_clock_us();
                if (now >= event->timestamp_us) {
                    latencies_ms.push_back(static_cast<double>(now - event->timestamp_us) /
                                           1000.0);
                }
            } else {
                delivered_errors.fetch_add(1);
            }
        }
    });

    for (auto& sensor : sensors) {
        sensor_threads.emplace_back([&sensor] { sensor->run(); });
    }

    const auto t0 = std::chrono::steady_clock::now();
    scheduler.start();
    std::this_thread::sleep_for(std::chrono::duration<double>(cfg.duration_s));
    scheduler.stop(); // closes trigger queues; sensors flush and exit
    for (auto& t : sensor_threads) t.join();

    uint64_t synthesized = 0;
    uint64_t sensor_drops = 0;
    for (const auto& sensor : sensors) {
        const auto s = sensor->stats();
        synthesized += s.synthesized;
        sensor_drops += s.dropped;
    }

    // Wait for the tail of the pipeline to drain.
    const uint64_t expected_images = synthesized - sensor_drops;
    const auto drain_deadline = std::chrono::steady_clock::now() + std::chrono::seconds(60);
    while (app.images_received() + delivered_errors.load() < expected_images &&
           std::chrono::steady_clock::now() < drain_deadline) {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    const auto t1 = std::chrono::steady_clock::now();
    collecting.store(false);
    collector.join();
    app.close();
    central.stop();

    SoakReport report;
    report.triggers = scheduler.triggers_emitted();
    report.synthesized = synthesized;
    report.delivered_images = app.images_received();
    report.delivered_errors = delivered_errors.load();
    report.sensor_drops = sensor_drops;
    report.trigger_drops = scheduler.triggers_dropped();
    report.duration_s = std::chrono::duration<double>(t1 - t0).count();
    report.delivered_per_s =
        static_cast<double>(report.delivered_images) / report.duration_s;
    uint64_t gap_total = 0;
    for (const auto& [serial, count] : app.gaps()) gap_total += count;
    report.seq_gaps = gap_total;
    report.scheduler_jitter_us = scheduler.measured_max_jitter_us();

    std::sort(latencies_ms.begin(), latencies_ms.end());
    report.latency_p50_ms = percentile(latencies_ms, 0.50);
    report.latency_p90_ms = percentile(latencies_ms, 0.90);
    report.latency_p99_ms = percentile(latencies_ms, 0.99);
    report.latency_max_ms = latencies_ms.empty() ? 0.0 : latencies_ms.back();
    return report;
}

std::string soak_summary(const SoakReport& r) {
    std::ostringstream out;
    out << "soak: " << r.delivered_images << " images in " << r.duration_s << " s ("
        << r.delivered_per_s << "/s), errors " << r.delivered_errors << ", drops "
        << r.total_drops() << " (sensor " << r.sensor_drops << ", trigger " << r.trigger_drops
        << "), seq gaps " << r.seq_gaps << "\n"
        << "latency ms: p50 " << r.latency_p50_ms << ", p90 " << r.latency_p90_ms << ", p99 "
        << r.latency_p99_ms << ", max " << r.latency_max_ms << "; scheduler jitter "
        << r.scheduler_jitter_us << " us\n";
    return out.str();
}

} // namespace sonarnet::bench
