#pragma once

#include "sonarnet/geometry.hpp"
#include "sonarnet/synth.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sonarnet::bench {

struct ConfigTiming {
    std::string name;
    size_t direction_count = 0;
    size_t n = 0;
    double mean_ms = 0.0;
    double std_ms = 0.0;
    double min_ms = 0.0;
    double max_ms = 0.0;
};

struct BenchReport {
    std::vector<ConfigTiming> rows;
    std::string hardware;
    int workers = 1;
    std::string timestamp; // ISO-8601 UTC
};

// Per-measurement process() timing: the workspace is built once and one
// measurement is synthesized up front (both excluded from timing), one
// warm-up iteration runs untimed, then n iterations are timed with a
// monotonic clock.
BenchReport run_benchmark(std::span<const GridKind> kinds, size_t n, const Scene& scene);
BenchReport run_benchmark_default(size_t n = 100);

// Table layout mirrors the classic report: configurations as columns,
// platform as the row.
std::string report_table(const BenchReport& report);
std::string report_csv(const BenchReport& report);
void save_report_csv(const BenchReport& report, const std::string& path);

struct SoakConfig {
    int sensors = 3;
    double rate_hz = 5.0;
    double duration_s = 30.0;
    int workers = 4;
    GridKind grid = GridKind::horizontal90;
    Scene scene; // default: one boresight reflector, noiseless
    size_t queue_capacity = 64;
};

struct SoakReport {
    uint64_t triggers = 0;
    uint64_t synthesized = 0;
    uint64_t delivered_images = 0;
    uint64_t delivered_errors = 0;
    uint64_t sensor_drops = 0;
    uint64_t trigger_drops = 0;
    uint64_t seq_gaps = 0;
    double duration_s = 0.0;
    double delivered_per_s = 0.0;
    double latency_p50_ms = 0.0;
    double latency_p90_ms = 0.0;
    double latency_p99_ms = 0.0;
    double latency_max_ms = 0.0;
    uint64_t scheduler_jitter_us = 0;

    uint64_t total_drops() const { return sensor_drops + trigger_drops; }
};

// Loopback run of the full stack: one shared trigger scheduler, `sensors`
// emulators, a processing-mode central with `workers` workers, and one
// subscriber. Latency is trigger timestamp to image delivery.
SoakReport run_soak(const SoakConfig& cfg);
std::string soak_summary(const SoakReport& report);

std::string hardware_description();

} // namespace sonarnet::bench
