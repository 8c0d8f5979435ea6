#include "sonarnet/nodes/central.hpp"

#include "sonarnet/detail/bytes.hpp"
#include "sonarnet/errors.hpp"
#include "sonarnet/nodes/log.hpp"
#include "sonarnet/nodes/sync.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace sonarnet::nodes {

namespace {

std::string measurement_filename(const wire::RawMeasurement& m) {
    char name[64];
    std::snprintf(name, sizeof(name), "%08x_%012llu_%llu.pdm", m.sensor_serial,
                  static_cast<unsigned long long>(m.seq),
                  static_cast<unsigned long long>(m.timestamp_us));
    return name;
}

} // namespace

CentralNode::CentralNode(CentralConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.workers < 1) throw ConfigError("central: workers must be >= 1");
    if (cfg_.input_queue_capacity < 1 || cfg_.output_queue_capacity < 1) {
        throw ConfigError("central: queue capacities must be >= 1");
    }
    if (cfg_.mode == CentralConfig::Mode::processing) {
        cfg_.pipeline.validate();
    } else if (cfg_.storage_dir.empty()) {
        throw ConfigError("central: storage mode needs a storage directory");
    }
}

CentralNode::~CentralNode() { stop(); }

void CentralNode::start() {
    if (running_.exchange(true)) return;

    listener_ = TcpListener::listen(cfg_.port);
    port_ = listener_.port();
    input_ = std::make_unique<BoundedQueue<WorkItem>>(cfg_.input_queue_capacity);

    if (cfg_.mode == CentralConfig::Mode::processing) {
        workspaces_.clear();
        workspaces_.reserve(static_cast<size_t>(cfg_.workers));
        for (int i = 0; i < cfg_.workers; ++i) {
            workspaces_.push_back(std::make_unique<Workspace>(cfg_.pipeline));
        }
    } else {
        std::filesystem::create_directories(cfg_.storage_dir);
    }

    {
        std::lock_guard lock(order_mutex_);
        draining_ = false;
        next_ticket_.clear();
        next_release_.clear();
        pending_.clear();
        pending_count_ = 0;
    }

    accept_thread_ = std::thread(&CentralNode::accept_loop, this);
    for (int i = 0; i < cfg_.workers; ++i) {
        worker_threads_.emplace_back(&CentralNode::worker_loop, this, i);
    }
    dispatch_thread_ = std::thread(&CentralNode::dispatch_loop, this);
    log::info("central: listening on port ", port_, " mode=",
              cfg_.mode == CentralConfig::Mode::storage ? "storage" : "processing",
              " workers=", cfg_.workers);
}

void CentralNode::stop() {
    if (!running_.exchange(false)) return;

    listener_.close();
    if (accept_thread_.joinable()) accept_thread_.join();
    {
        std::lock_guard lock(connection_threads_mutex_);
        for (auto& t : connection_threads_) {
            if (t.joinable()) t.join();
        }
        connection_threads_.clear();
    }
    if (input_) input_->close();
    for (auto& t : worker_threads_) {
        if (t.joinable()) t.join();
    }
    worker_threads_.clear();
    {
        std::lock_guard lock(order_mutex_);
        draining_ = true;
        order_cv_.notify_all();
    }
    if (dispatch_thread_.joinable()) dispatch_thread_.join();
    {
        std::lock_guard lock(subscribers_mutex_);
        for (auto& s : subscribers_) s->socket.close();
        subscribers_.clear();
    }
    workspaces_.clear();
}

void CentralNode::accept_loop() {
    while (running_.load(std::memory_order_relaxed)) {
        auto socket = listener_.accept(100);
        if (!socket) continue;
        auto shared = std::make_shared<TcpSocket>(std::move(*socket));
        std::lock_guard lock(connection_threads_mutex_);
        connection_threads_.emplace_back(&CentralNode::connection_loop, this, shared);
    }
}

void CentralNode::connection_loop(std::shared_ptr<TcpSocket> socket) {
    wire::PacketDecoder decoder;
    std::vector<uint8_t> buffer(64 * 1024);
    std::shared_ptr<Subscriber> subscriber; // set once this peer subscribes

    while (running_.load(std::memory_order_relaxed)) {
        const long n = socket->recv_some({buffer.data(), buffer.size()}, 200);
        if (n == 0) break; // orderly shutdown
        if (n < 0) {
            if (socket->last_was_timeout()) continue;
            break;
        }
        decoder.feed({buffer.data(), static_cast<size_t>(n)});

        while (true) {
            auto event = decoder.next();
            if (event.status == wire::PacketDecoder::Status::need_more) break;
            if (event.status != wire::PacketDecoder::Status::packet) {
                malformed_.fetch_add(1);
                log::warn("central: ", event.message);
                continue;
            }
            const wire::Packet& p = event.packet;
            switch (p.msg_type) {
                case wire::MsgType::raw_measurement: {
                    WorkItem item;
                    try {
                        item.measurement =
                            wire::decode_raw_measurement({p.payload.data(), p.payload.size()});
                    } catch (const DecodeError& e) {
                        malformed_.fetch_add(1);
                        log::warn("central: bad measurement payload: ", e.what());
                        continue;
                    }
                    {
                        std::lock_guard lock(order_mutex_);
                        item.ticket = next_ticket_[item.measurement.sensor_serial]++;
                    }
                    measurements_.fetch_add(1);
                    // Blocking push: overload stalls this connection (TCP
                    // backpressure) instead of dropping data.
                    if (!input_->push(std::move(item))) return;
                    break;
                }
                case wire::MsgType::subscribe: {
                    if (cfg_.mode == CentralConfig::Mode::storage) {
                        const auto frame = wire::error_frame(0, wall_clock_us(), p.seq,
                                                             "no processed stream");
                        socket->send_all({frame.data(), frame.size()});
                        log::info("central: rejected subscriber (storage mode)");
                        return;
                    }
                    std::vector<uint32_t> serials;
                    try {
                        serials = wire::decode_subscribe({p.payload.data(), p.payload.size()});
                    } catch (const DecodeError& e) {
                        malformed_.fetch_add(1);
                        log::warn("central: bad subscribe payload: ", e.what());
                        continue;
                    }
                    subscriber = std::make_shared<Subscriber>();
                    subscriber->socket = std::move(*socket);
                    subscriber->filter.insert(serials.begin(), serials.end());
                    {
                        std::lock_guard lock(subscribers_mutex_);
                        subscribers_.push_back(subscriber);
                    }
                    wire::Packet ack;
                    ack.msg_type = wire::MsgType::ack;
                    ack.timestamp_us = wall_clock_us();
                    ack.seq = p.seq;
                    const auto frame = wire::encode_packet(ack);
                    {
                        std::lock_guard lock(subscriber->write_mutex);
                        subscriber->socket.send_all({frame.data(), frame.size()});
                    }
                    socket = std::shared_ptr<TcpSocket>(subscriber, &subscriber->socket);
                    log::info("central: subscriber attached (filter size ",
                              subscriber->filter.size(), ")");
                    break;
                }
                default:
                    malformed_.fetch_add(1);
                    log::warn("central: unexpected message type ",
                              static_cast<int>(p.msg_type));
                    break;
            }
        }
    }
    if (subscriber) subscriber->alive.store(false);
}

void CentralNode::store_measurement(const wire::RawMeasurement& m) {
    const std::string name = measurement_filename(m);
    const auto path = std::filesystem::path(cfg_.storage_dir) / name;
    const auto bytes = wire::encode_raw_measurement(m);
    detail::write_file(path.string(), {bytes.data(), bytes.size()});

    std::lock_guard lock(manifest_mutex_);
    std::ofstream manifest(std::filesystem::path(cfg_.storage_dir) / "manifest.tsv",
                           std::ios::app);
    manifest << m.sensor_serial << '\t' << m.seq << '\t' << m.timestamp_us << '\t' << name
             << '\t' << bytes.size() << '\n';
    files_stored_.fetch_add(1);
}

void CentralNode::complete(uint32_t serial, uint64_t ticket, Outcome outcome) {
    std::unique_lock lock(order_mutex_);
    // Bounded "output queue": workers wait here when the dispatcher lags.
    // The outcome the dispatcher is waiting for must always get in, or the
    // reorder window could deadlock against the capacity limit.
    order_cv_.wait(lock, [&] {
        return pending_count_ < cfg_.output_queue_capacity ||
               next_release_[serial] == ticket || draining_;
    });
    pending_[{serial, ticket}] = std::move(outcome);
    ++pending_count_;
    order_cv_.notify_all();
}

void CentralNode::worker_loop(int index) {
    while (true) {
        auto item = input_->pop();
        if (!item) break;
        const auto& m = item->measurement;

        if (cfg_.worker_delay_ms > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(cfg_.worker_delay_ms));
        }

        if (cfg_.mode == CentralConfig::Mode::storage) {
            try {
                store_measurement(m);
            } catch (const std::exception& e) {
                log::error("central: storing measurement failed: ", e.what());
            }
            continue;
        }

        Outcome outcome;
        outcome.serial = m.sensor_serial;
        outcome.timestamp_us = m.timestamp_us;
        outcome.seq = m.seq;
        try {
            outcome.image = workspaces_[static_cast<size_t>(index)]->process(m);
            outcome.ok = true;
        } catch (const std::exception& e) {
            outcome.error = e.what();
            log::warn("central: worker ", index, " failed on seq ", m.seq, ": ", e.what());
        }
        complete(m.sensor_serial, item->ticket, std::move(outcome));
    }
}

void CentralNode::dispatch_loop() {
    while (true) {
        Outcome outcome;
        {
            std::unique_lock lock(order_mutex_);
            order_cv_.wait(lock, [&] {
                if (draining_ && pending_.empty()) return true;
                for (const auto& [key, value] : pending_) {
                    if (next_release_[key.first] == key.second) return true;
                }
                return false;
            });
            bool found = false;
            for (auto it = pending_.begin(); it != pending_.end(); ++it) {
                if (next_release_[it->first.first] == it->first.second) {
                    outcome = std::move(it->second);
                    ++next_release_[it->first.first];
                    pending_.erase(it);
                    --pending_count_;
                    found = true;
                    break;
                }
            }
            order_cv_.notify_all();
            if (!found) {
                if (draining_ && pending_.empty()) return;
                continue;
            }
        }

        std::vector<std::shared_ptr<Subscriber>> targets;
        {
            std::lock_guard lock(subscribers_mutex_);
            std::erase_if(subscribers_, [](const auto& s) { return !s->alive.load(); });
            for (const auto& s : subscribers_) {
                if (wants(*s, outcome.serial)) targets.push_back(s);
            }
        }
        if (targets.empty()) {
            // No interested subscribers: image is discarded, node stays up.
            if (outcome.ok) {
                images_dispatched_.fetch_add(1);
            } else {
                errors_dispatched_.fetch_add(1);
            }
            continue;
        }
        const auto frame = outcome.ok
                               ? wire::image_frame(outcome.image, outcome.seq)
                               : wire::error_frame(outcome.serial, outcome.timestamp_us,
                                                   outcome.seq, outcome.error);
        for (const auto& s : targets) {
            std::lock_guard lock(s->write_mutex);
            if (!s->socket.send_all({frame.data(), frame.size()})) {
                s->alive.store(false);
                log::info("central: subscriber dropped (send failed)");
            }
        }
        if (outcome.ok) {
            images_dispatched_.fetch_add(1);
        } else {
            errors_dispatched_.fetch_add(1);
        }
    }
}

bool CentralNode::wants(const Subscriber& s, uint32_t serial) const {
    return s.filter.empty() || s.filter.contains(serial);
}

CentralNode::Stats CentralNode::stats() const {
    Stats s;
    s.measurements = measurements_.load();
    s.images_dispatched = images_dispatched_.load();
    s.errors_dispatched = errors_dispatched_.load();
    s.malformed = malformed_.load();
    s.files_stored = files_stored_.load();
    {
        std::lock_guard lock(subscribers_mutex_);
        s.subscribers = static_cast<uint64_t>(
            std::count_if(subscribers_.begin(), subscribers_.end(),
                          [](const auto& sub) { return sub->alive.load(); }));
    }
    return s;
}

} // namespace sonarnet::nodes
