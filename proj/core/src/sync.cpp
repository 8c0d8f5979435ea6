#include "sonarnet/nodes/sync.hpp"

#include "sonarnet/errors.hpp"
#include "sonarnet/nodes/log.hpp"

#include <chrono>

namespace sonarnet::nodes {

uint64_t wall_clock_us() {
    return static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::microseconds>(
                                     std::chrono::system_clock::now().time_since_epoch())
                                     .count());
}

TriggerScheduler::TriggerScheduler(double rate_hz) : rate_hz_(rate_hz) {
    if (rate_hz <= 0.0) throw ConfigError("trigger rate must be > 0");
}

TriggerScheduler::~TriggerScheduler() { stop(); }

std::shared_ptr<BoundedQueue<Trigger>> TriggerScheduler::subscribe(size_t capacity) {
    if (running_.load()) throw ConfigError("subscribe before starting the scheduler");
    auto queue = std::make_shared<BoundedQueue<Trigger>>(capacity);
    subscribers_.push_back(queue);
    return queue;
}

void TriggerScheduler::start() {
    bool expected = false;
    if (!running_.compare_exchange_strong(expected, true)) return;
    thread_ = std::thread(&TriggerScheduler::run, this);
}

void TriggerScheduler::stop() {
    bool expected = true;
    if (running_.compare_exchange_strong(expected, false)) {
        if (thread_.joinable()) thread_.join();
    } else if (thread_.joinable()) {
        thread_.join();
    }
    for (auto& queue : subscribers_) queue->close();
}

void TriggerScheduler::run() {
    using clock = std::chrono::steady_clock;
    const auto period = std::chrono::duration_cast<clock::duration>(
        std::chrono::duration<double>(1.0 / rate_hz_));
    const auto start = clock::now();
    const uint64_t wall_start = wall_clock_us();
    uint64_t seq = 0;
    while (running_.load(std::memory_order_relaxed)) {
        const auto nominal = start + period * seq;
        std::this_thread::sleep_until(nominal);
        if (!running_.load(std::memory_order_relaxed)) break;

        Trigger t;
        t.timestamp_us = wall_clock_us();
        t.seq = seq;

        const uint64_t nominal_wall =
            wall_start + static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::microseconds>(
                                                   nominal - start)
                                                   .count());
        const uint64_t jitter = t.timestamp_us >= nominal_wall ? t.timestamp_us - nominal_wall
                                                               : nominal_wall - t.timestamp_us;
        uint64_t prev = max_jitter_us_.load(std::memory_order_relaxed);
        while (jitter > prev &&
               !max_jitter_us_.compare_exchange_weak(prev, jitter, std::memory_order_relaxed)) {
        }

        for (auto& queue : subscribers_) {
            if (queue->closed()) continue; // subscriber left, not a drop
            if (!queue->try_push(t)) {
                dropped_.fetch_add(1, std::memory_order_relaxed);
                log::warn("scheduler: subscriber queue full, trigger ", seq, " dropped");
            }
        }
        emitted_.fetch_add(1, std::memory_order_relaxed);
        ++seq;
    }
}

} // namespace sonarnet::nodes
