#pragma once

#include "sonarnet/nodes/sync.hpp"
#include "sonarnet/nodes/tcp.hpp"
#include "sonarnet/pipeline.hpp"
#include "sonarnet/synth.hpp"

#include <atomic>
#include <cstdint>
#include <deque>
#include <memory>

namespace sonarnet::nodes {

struct SensorConfig {
    uint32_t serial = 1;
    Endpoint central;
    Scene scene;
    PipelineConfig pipeline = default_pipeline_config();
    double trigger_rate_hz = 20.0; // used when running with an internal scheduler
    size_t buffer_capacity = 64;   // encoded frames kept across outages
    uint64_t max_measurements = 0; // 0 = run until stopped
    int reconnect_initial_ms = 50;
    int reconnect_max_ms = 2000;
};

// Emulates one eRTIS sensor + its uplink: on every trigger it synthesizes a
// measurement from the configured scene, frames it and sends it to the
// central node. Frames survive connection loss in a bounded local buffer;
// when that overflows the oldest frame is dropped and counted.
class SensorNode {
public:
    // Triggers come from an external scheduler queue (shared SYNC), or pass
    // nullptr to run an internal scheduler at cfg.trigger_rate_hz.
    SensorNode(SensorConfig cfg, std::shared_ptr<BoundedQueue<Trigger>> triggers = nullptr);

    // Blocks until the trigger stream closes, max_measurements is reached
    // or stop() is called. Flushes the send buffer on the way out.
    void run();
    void stop();

    struct Stats {
        uint64_t triggers = 0;
        uint64_t synthesized = 0;
        uint64_t sent = 0;
        uint64_t dropped = 0;
        uint64_t reconnects = 0;
    };
    Stats stats() const;

private:
    bool ensure_connected();
    void flush_buffer();

    SensorConfig cfg_;
    std::shared_ptr<BoundedQueue<Trigger>> triggers_;
    std::unique_ptr<TriggerScheduler> own_scheduler_;

    TcpSocket socket_;
    bool connected_ = false;
    std::chrono::steady_clock::time_point next_attempt_{};
    int backoff_ms_ = 0;

    std::deque<std::vector<uint8_t>> buffer_;
    std::atomic<bool> stop_{false};
    std::atomic<uint64_t> triggers_seen_{0};
    std::atomic<uint64_t> synthesized_{0};
    std::atomic<uint64_t> sent_{0};
    std::atomic<uint64_t> dropped_{0};
    std::atomic<uint64_t> reconnects_{0};
};

} // namespace sonarnet::nodes
