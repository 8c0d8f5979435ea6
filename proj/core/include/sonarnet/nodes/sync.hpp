#pragma once

#include "sonarnet/nodes/queue.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <thread>
#include <vector>

namespace sonarnet::nodes {

// One measurement trigger. Every sensor fed by the same scheduler sees the
// same (timestamp_us, seq) pair -- the software stand-in for the hardware
// SYNC chain (whose propagation delay is modeled as zero).
struct Trigger {
    uint64_t timestamp_us = 0;
    uint64_t seq = 0;
};

class TriggerScheduler {
public:
    explicit TriggerScheduler(double rate_hz);
    ~TriggerScheduler();

    TriggerScheduler(const TriggerScheduler&) = delete;
    TriggerScheduler& operator=(const TriggerScheduler&) = delete;

    // Subscribe before start(). Each subscriber gets its own queue; a full
    // queue drops that trigger for that subscriber (counted).
    std::shared_ptr<BoundedQueue<Trigger>> subscribe(size_t capacity = 128);

    void start();
    // Stops emitting and closes all subscriber queues.
    void stop();

    uint64_t triggers_emitted() const { return emitted_.load(); }
    uint64_t triggers_dropped() const { return dropped_.load(); }
    // Largest |actual - nominal| emission offset seen, microseconds.
    uint64_t measured_max_jitter_us() const { return max_jitter_us_.load(); }

private:
    void run();

    double rate_hz_;
    std::vector<std::shared_ptr<BoundedQueue<Trigger>>> subscribers_;
    std::thread thread_;
    std::atomic<bool> running_{false};
    std::atomic<uint64_t> emitted_{0};
    std::atomic<uint64_t> dropped_{0};
    std::atomic<uint64_t> max_jitter_us_{0};
};

// Microseconds since the Unix epoch, from the system clock.
uint64_t wall_clock_us();

} // namespace sonarnet::nodes
