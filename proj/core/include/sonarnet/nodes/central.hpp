#pragma once

#include "sonarnet/nodes/queue.hpp"
#include "sonarnet/nodes/tcp.hpp"
#include "sonarnet/pipeline.hpp"
#include "sonarnet/wire.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace sonarnet::nodes {

struct CentralConfig {
    enum class Mode { storage, processing };

    Mode mode = Mode::processing;
    uint16_t port = 0; // 0 picks an ephemeral port (see CentralNode::port())
    int workers = 2;
    PipelineConfig pipeline = default_pipeline_config(); // processing mode
    std::string storage_dir = "measurements";            // storage mode
    size_t input_queue_capacity = 64;
    size_t output_queue_capacity = 64;
    int worker_delay_ms = 0; // test hook: per-measurement artificial stall
};

// Star-topology hub: accepts sensor connections, queues decoded
// measurements, runs K workers (one preallocated Workspace each in
// processing mode), and fans processed images out to every subscribed
// application node. Queues are bounded and pushes block: overload turns
// into backpressure on the sensors, never silent loss.
class CentralNode {
public:
    explicit CentralNode(CentralConfig cfg);
    ~CentralNode();

    CentralNode(const CentralNode&) = delete;
    CentralNode& operator=(const CentralNode&) = delete;

    void start(); // throws IoError if the port cannot be bound
    void stop();

    uint16_t port() const { return port_; }

    struct Stats {
        uint64_t measurements = 0;
        uint64_t images_dispatched = 0;
        uint64_t errors_dispatched = 0;
        uint64_t malformed = 0;
        uint64_t files_stored = 0;
        uint64_t subscribers = 0;
    };
    Stats stats() const;

private:
    struct WorkItem {
        uint64_t ticket = 0;
        wire::RawMeasurement measurement;
    };

    struct Outcome {
        bool ok = false;
        AcousticImage image;
        std::string error;
        uint32_t serial = 0;
        uint64_t timestamp_us = 0;
        uint64_t seq = 0;
    };

    struct Subscriber {
        TcpSocket socket;
        std::set<uint32_t> filter; // empty = all sensors
        std::mutex write_mutex;
        std::atomic<bool> alive{true};
    };

    void accept_loop();
    void connection_loop(std::shared_ptr<TcpSocket> socket);
    void worker_loop(int index);
    void dispatch_loop();
    void store_measurement(const wire::RawMeasurement& m);
    void complete(uint32_t serial, uint64_t ticket, Outcome outcome);
    bool wants(const Subscriber& s, uint32_t serial) const;

    CentralConfig cfg_;
    uint16_t port_ = 0;
    TcpListener listener_;
    std::atomic<bool> running_{false};

    std::unique_ptr<BoundedQueue<WorkItem>> input_;

    // Completions are released to the dispatcher strictly in per-sensor
    // arrival order (tickets are dense per serial), which restores seq
    // order no matter how workers interleave.
    std::mutex order_mutex_;
    std::condition_variable order_cv_;
    std::map<uint32_t, uint64_t> next_ticket_;
    std::map<uint32_t, uint64_t> next_release_;
    std::map<std::pair<uint32_t, uint64_t>, Outcome> pending_;
    size_t pending_count_ = 0;
    bool draining_ = false;

    mutable std::mutex subscribers_mutex_;
    std::vector<std::shared_ptr<Subscriber>> subscribers_;

    std::mutex manifest_mutex_;

    std::thread accept_thread_;
    std::vector<std::thread> connection_threads_;
    std::mutex connection_threads_mutex_;
    std::vector<std::thread> worker_threads_;
    std::thread dispatch_thread_;
    std::vector<std::unique_ptr<Workspace>> workspaces_;

    std::atomic<uint64_t> measurements_{0};
    std::atomic<uint64_t> images_dispatched_{0};
    std::atomic<uint64_t> errors_dispatched_{0};
    std::atomic<uint64_t> malformed_{0};
    std::atomic<uint64_t> files_stored_{0};
};

} // namespace sonarnet::nodes
