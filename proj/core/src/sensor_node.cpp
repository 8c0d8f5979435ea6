#include "sonarnet/nodes/sensor.hpp"

#include "sonarnet/errors.hpp"
#include "sonarnet/nodes/log.hpp"
#include "sonarnet/wire.hpp"

#include <algorithm>
#include <chrono>

namespace sonarnet::nodes {

SensorNode::SensorNode(SensorConfig cfg, std::shared_ptr<BoundedQueue<Trigger>> triggers)
    : cfg_(std::move(cfg)), triggers_(std::move(triggers)) {
    cfg_.pipeline.validate();
    if (!triggers_) {
        own_scheduler_ = std::make_unique<TriggerScheduler>(cfg_.trigger_rate_hz);
        triggers_ = own_scheduler_->subscribe();
    }
}

bool SensorNode::ensure_connected() {
    if (connected_) return true;
    const auto now = std::chrono::steady_clock::now();
    if (now < next_attempt_) return false;
    try {
        socket_ = TcpSocket::connect(cfg_.central);
        connected_ = true;
        backoff_ms_ = 0;
        reconnects_.fetch_add(1);
        log::info("sensor ", cfg_.serial, ": connected to ", cfg_.central.host, ":",
                  cfg_.central.port);
        return true;
    } catch (const IoError& e) {
        backoff_ms_ = backoff_ms_ == 0
                          ? cfg_.reconnect_initial_ms
                          : std::min(backoff_ms_ * 2, cfg_.reconnect_max_ms);
        next_attempt_ = now + std::chrono::milliseconds(backoff_ms_);
        log::debug("sensor ", cfg_.serial, ": connect failed (", e.what(), "), retry in ",
                   backoff_ms_, " ms");
        return false;
    }
}

void SensorNode::flush_buffer() {
    while (!buffer_.empty() && !stop_.load(std::memory_order_relaxed)) {
        if (!ensure_connected()) return;
        const auto& frame = buffer_.front();
        if (socket_.send_all({frame.data(), frame.size()})) {
            buffer_.pop_front();
            sent_.fetch_add(1);
        } else {
            connected_ = false;
            socket_.close();
            log::warn("sensor ", cfg_.serial, ": connection lost, ", buffer_.size(),
                      " frames buffered");
            return;
        }
    }
}

void SensorNode::run() {
    if (own_scheduler_) own_scheduler_->start();
    while (!stop_.load(std::memory_order_relaxed)) {
        auto trigger = triggers_->pop_for(std::chrono::milliseconds(100));
        if (!trigger) {
            if (triggers_->closed()) break;
            flush_buffer(); // keep retrying the backlog between triggers
            continue;
        }
        triggers_seen_.fetch_add(1);

        const auto measurement = synthesize_measurement(cfg_.pipeline, cfg_.scene, cfg_.serial,
                                                        trigger->timestamp_us, trigger->seq);
        synthesized_.fetch_add(1);
        buffer_.push_back(wire::measurement_frame(measurement));
        if (buffer_.size() > cfg_.buffer_capacity) {
            buffer_.pop_front();
            dropped_.fetch_add(1);
            log::warn("sensor ", cfg_.serial, ": buffer overflow, dropped oldest frame (",
                      dropped_.load(), " total)");
        }
        flush_buffer();

        if (cfg_.max_measurements > 0 && synthesized_.load() >= cfg_.max_measurements) break;
    }
    // Final flush: give the backlog a bounded grace period.
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
    while (!buffer_.empty() && !stop_.load(std::memory_order_relaxed) &&
           std::chrono::steady_clock::now() < deadline) {
        flush_buffer();
        if (!buffer_.empty()) std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    triggers_->close(); // signals the scheduler this sensor is gone
    if (own_scheduler_) own_scheduler_->stop();
    socket_.close();
    connected_ = false;
}

void SensorNode::stop() {
    stop_.store(true);
    if (own_scheduler_) own_scheduler_->stop();
}

SensorNode::Stats SensorNode::stats() const {
    Stats s;
    s.triggers = triggers_seen_.load();
    s.synthesized = synthesized_.load();
    s.sent = sent_.load();
    s.dropped = dropped_.load();
    // First successful connect is not a re-connect.
    const uint64_t connects = reconnects_.load();
    s.reconnects = connects > 0 ? connects - 1 : 0;
    return s;
}

} // namespace sonarnet::nodes
